#include "anova/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>

#include "anova/error.hpp"

namespace anova {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream,
                           Purpose purpose) {
  std::uint64_t state = seed;
  std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (stream * 0xd1b54a32d192ed03ULL);
  mixed = splitmix64(state);
  state = mixed ^ (static_cast<std::uint64_t>(purpose) * 0x8cb92ba72f3d8dd7ULL);
  engine_.seed(splitmix64(state));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  return u * factor;
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "below(0) has no valid output");
  }
  // rejection keeps the result unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r = 0;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

FriedmanSpec FriedmanSpec::standard(int which) {
  switch (which) {
    case 1:
      return {1, 10, 1.0};
    case 2:
      return {2, 4, 125.0};
    case 3:
      return {3, 4, 0.1};
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "Friedman function must be 1, 2 or 3, got " +
                      std::to_string(which));
  }
}

double friedman_eval(const FriedmanSpec& spec, std::span<const double> x) {
  if (x.size() != spec.dimension) {
    throw Error(ErrorCode::DimensionMismatch,
                "Friedman " + std::to_string(spec.which) + " expects " +
                    std::to_string(spec.dimension) + " coordinates, got " +
                    std::to_string(x.size()));
  }
  constexpr double pi = std::numbers::pi;
  if (spec.which == 1) {
    return 10.0 * std::sin(pi * x[0] * x[1]) +
           20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] + 5.0 * x[4];
  }
  const double s1 = 100.0 * x[0];
  const double s2 = 520.0 * pi * x[1] + 40.0 * pi;
  const double s4 = 10.0 * x[3] + 1.0;
  const double inner = s2 * x[2] - 1.0 / (s2 * s4);
  if (spec.which == 2) return std::sqrt(s1 * s1 + inner * inner);
  if (spec.which == 3) {
    // s1 >= 0, so atan2 equals arctan(inner / s1) and yields the
    // +-pi/2 limit at x1 = 0
    return std::atan2(inner, s1);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown Friedman function");
}

Dataset friedman_sample(const FriedmanSpec& spec, std::size_t count,
                        RandomStream& rng) {
  Dataset ds;
  ds.nodes = Matrix(count, spec.dimension);
  ds.values.resize(count);
  ds.clean_values.resize(count);
  for (std::size_t j = 0; j < spec.dimension; ++j) {
    ds.columns.push_back("x" + std::to_string(j + 1));
  }
  ds.target_name = "f" + std::to_string(spec.which);
  for (std::size_t m = 0; m < count; ++m) {
    for (std::size_t j = 0; j < spec.dimension; ++j) {
      ds.nodes(m, j) = rng.uniform();
    }
  }
  for (std::size_t m = 0; m < count; ++m) {
    const double f = friedman_eval(spec, ds.nodes.row(m));
    ds.clean_values[m] = f;
    ds.values[m] = spec.noise_sd > 0.0 ? f + spec.noise_sd * rng.normal() : f;
  }
  return ds;
}

Dataset friedman_sample(const FriedmanSpec& spec, std::size_t count,
                        std::uint64_t seed) {
  RandomStream rng(seed);
  return friedman_sample(spec, count, rng);
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no,
                  const std::string& column) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) +
                                      ", column '" + column +
                                      "': not a finite number: '" + cell + "'");
  }
  return value;
}

}  // namespace

Dataset read_csv(std::istream& in, const TargetColumn& target) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.size() >= 3 &&
        line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    header = split_line(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::Parse, "CSV input is empty");

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t target_index = kNone;
  if (const auto* name = std::get_if<std::string>(&target)) {
    const auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) {
      throw Error(ErrorCode::Parse, "target column '" + *name + "' not found");
    }
    target_index = static_cast<std::size_t>(it - header.begin());
  } else if (const auto* index = std::get_if<std::size_t>(&target)) {
    target_index = *index;
    if (target_index >= header.size()) {
      throw Error(ErrorCode::Parse,
                  "target column index " + std::to_string(target_index) +
                      " out of range for " + std::to_string(header.size()) +
                      " columns");
    }
  }
  const std::size_t features = header.size() - (target_index == kNone ? 0 : 1);
  if (features == 0) {
    throw Error(ErrorCode::Parse, "CSV needs at least one feature column");
  }

  Dataset ds;
  if (target_index != kNone) ds.target_name = header[target_index];
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_index) ds.columns.push_back(header[c]);
  }
  std::vector<double> row(features);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) +
                                        " has " + std::to_string(cells.size()) +
                                        " cells, header has " +
                                        std::to_string(header.size()));
    }
    std::size_t j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_cell(cells[c], line_no, header[c]);
      if (c == target_index) {
        ds.values.push_back(v);
      } else {
        row[j++] = v;
      }
    }
    ds.nodes.append_row(row);
  }
  if (ds.nodes.rows() == 0) throw Error(ErrorCode::Parse, "CSV has no data rows");
  return ds;
}

Dataset load_csv(const std::string& path, const TargetColumn& target) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return read_csv(in, target);
}

Normalization compute_normalization(const Dataset& reference,
                                    bool include_target) {
  if (reference.size() == 0) {
    throw Error(ErrorCode::EmptySystem, "cannot normalize against empty data");
  }
  const std::size_t d = reference.dimension();
  Normalization stats;
  stats.min.assign(d, std::numeric_limits<double>::infinity());
  stats.max.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t m = 0; m < reference.size(); ++m) {
    for (std::size_t j = 0; j < d; ++j) {
      stats.min[j] = std::min(stats.min[j], reference.nodes(m, j));
      stats.max[j] = std::max(stats.max[j], reference.nodes(m, j));
    }
  }
  if (include_target) {
    const auto [lo, hi] =
        std::minmax_element(reference.values.begin(), reference.values.end());
    stats.target = std::make_pair(*lo, *hi);
  }
  return stats;
}

namespace {

double scale_unit(double x, double lo, double hi) {
  if (!(hi > lo)) return 0.5;
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

}  // namespace

Dataset apply_normalization(const Dataset& ds, const Normalization& stats) {
  if (stats.min.size() != ds.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "normalization has " + std::to_string(stats.min.size()) +
                    " columns, data has " + std::to_string(ds.dimension()));
  }
  Dataset out = ds;
  for (std::size_t m = 0; m < out.size(); ++m) {
    for (std::size_t j = 0; j < out.dimension(); ++j) {
      out.nodes(m, j) = scale_unit(ds.nodes(m, j), stats.min[j], stats.max[j]);
    }
  }
  if (stats.target) {
    const auto [lo, hi] = *stats.target;
    // targets are not clamped: they are not confined to a basis domain
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : out.values) v = (v - lo) / span;
    for (double& v : out.clean_values) v = (v - lo) / span;
  }
  out.normalization = stats;
  return out;
}

Dataset normalize(const Dataset& ds, const Dataset* reference,
                  bool include_target) {
  return apply_normalization(
      ds, compute_normalization(reference ? *reference : ds, include_target));
}

std::vector<double> denormalize_targets(std::span<const double> values,
                                        const Normalization& stats) {
  std::vector<double> out(values.begin(), values.end());
  if (!stats.target) return out;
  const auto [lo, hi] = *stats.target;
  const double span = hi > lo ? hi - lo : 1.0;
  for (double& v : out) v = v * span + lo;
  return out;
}

Dataset project_columns(const Dataset& ds, const Term& keep) {
  if (keep.empty()) {
    throw Error(ErrorCode::InvalidArgument, "projection keeps no columns");
  }
  for (std::size_t j : keep) {
    if (j >= ds.dimension()) {
      throw Error(ErrorCode::InvalidArgument,
                  "column " + std::to_string(j + 1) + " out of range");
    }
  }
  Dataset out;
  out.nodes = Matrix(ds.size(), keep.size());
  for (std::size_t m = 0; m < ds.size(); ++m) {
    for (std::size_t c = 0; c < keep.size(); ++c) {
      out.nodes(m, c) = ds.nodes(m, keep[c]);
    }
  }
  out.values = ds.values;
  out.clean_values = ds.clean_values;
  out.target_name = ds.target_name;
  for (std::size_t j : keep) {
    if (j < ds.columns.size()) out.columns.push_back(ds.columns[j]);
  }
  if (ds.normalization) {
    Normalization n;
    for (std::size_t j : keep) {
      n.min.push_back(ds.normalization->min[j]);
      n.max.push_back(ds.normalization->max[j]);
    }
    n.target = ds.normalization->target;
    out.normalization = n;
  }
  return out;
}

void SplitPlan::validate() const {
  if (repetitions < 1) {
    throw Error(ErrorCode::InvalidArgument, "at least one repetition required");
  }
  if (const auto* f = std::get_if<Fraction>(&mode)) {
    if (!(f->train > 0.0 && f->train < 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "training fraction must lie in (0, 1)");
    }
  } else {
    const auto& g = std::get<Generated>(mode);
    if (g.train < 1 || g.test < 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "generated sets need at least one node each");
    }
  }
}

namespace {

Dataset take_rows(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.nodes = Matrix(rows.size(), ds.dimension());
  out.columns = ds.columns;
  out.target_name = ds.target_name;
  out.normalization = ds.normalization;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(ds.nodes.row(rows[i]).begin(), ds.nodes.row(rows[i]).end(),
              out.nodes.row(i).begin());
    out.values.push_back(ds.values[rows[i]]);
    if (!ds.clean_values.empty()) {
      out.clean_values.push_back(ds.clean_values[rows[i]]);
    }
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitPlan& plan,
                                  std::size_t repetition) {
  plan.validate();
  const auto* fraction = std::get_if<SplitPlan::Fraction>(&plan.mode);
  if (!fraction) {
    throw Error(ErrorCode::InvalidArgument,
                "split needs a fractional plan; generated plans sample fresh "
                "data");
  }
  if (repetition >= plan.repetitions) {
    throw Error(ErrorCode::InvalidArgument,
                "repetition " + std::to_string(repetition) + " >= " +
                    std::to_string(plan.repetitions));
  }
  const std::size_t m = ds.size();
  const auto train_count = static_cast<std::size_t>(
      std::llround(fraction->train * static_cast<double>(m)));
  if (train_count == 0 || train_count >= m) {
    throw Error(ErrorCode::InvalidArgument,
                "training fraction " + std::to_string(fraction->train) +
                    " leaves an empty side for " + std::to_string(m) +
                    " rows");
  }
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  RandomStream rng(plan.seed, repetition, RandomStream::Purpose::Split);
  for (std::size_t i = m - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  const std::span<const std::size_t> all(order);
  return {take_rows(ds, all.first(train_count)),
          take_rows(ds, all.subspan(train_count))};
}

std::pair<Dataset, Dataset> generate_pair(const FriedmanSpec& spec,
                                          const SplitPlan& plan,
                                          std::size_t repetition) {
  plan.validate();
  const auto* gen = std::get_if<SplitPlan::Generated>(&plan.mode);
  if (!gen) {
    throw Error(ErrorCode::InvalidArgument,
                "generate_pair needs a generated plan");
  }
  RandomStream train_rng(plan.seed, repetition,
                         RandomStream::Purpose::TrainNodes);
  RandomStream test_rng(plan.seed, repetition, RandomStream::Purpose::TestNodes);
  return {friedman_sample(spec, gen->train, train_rng),
          friedman_sample(spec, gen->test, test_rng)};
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <class Make>
EvaluationSummary run_repetitions(const Recipe& recipe, const SplitPlan& plan,
                                  std::string metric, Make make_pair) {
  plan.validate();
  const std::size_t reps = plan.repetitions;
  std::vector<double> value(reps, 0.0);
  std::vector<std::string> error(reps);
  std::vector<char> ok(reps, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(reps); ++r) {
    const auto rep = static_cast<std::size_t>(r);
    try {
      const auto [train, test] = make_pair(rep);
      value[rep] = recipe(train, test, rep);
      ok[rep] = std::isfinite(value[rep]) ? 1 : 0;
      if (!ok[rep]) error[rep] = "non-finite metric";
    } catch (const std::exception& e) {
      error[rep] = e.what();
    }
  }
  std::vector<double> values;
  std::vector<std::string> failures;
  for (std::size_t r = 0; r < reps; ++r) {
    if (ok[r]) {
      values.push_back(value[r]);
    } else {
      failures.push_back("repetition " + std::to_string(r) + ": " + error[r]);
    }
  }
  if (values.empty()) {
    throw Error(ErrorCode::AllRepetitionsFailed,
                "all " + std::to_string(reps) + " repetitions failed" +
                    (failures.empty() ? "" : "; first: " + failures.front()));
  }
  return summarize(std::move(metric), std::move(values), std::move(failures));
}

}  // namespace

EvaluationSummary summarize(std::string metric, std::vector<double> values,
                            std::vector<std::string> failures) {
  if (values.empty()) {
    throw Error(ErrorCode::AllRepetitionsFailed, "no metric values to summarize");
  }
  EvaluationSummary s;
  s.metric = std::move(metric);
  s.failures = failures.size();
  s.repetitions = values.size() + failures.size();
  s.failure_messages = std::move(failures);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  s.median = quantile_sorted(sorted, 0.5);
  s.q1 = quantile_sorted(sorted, 0.25);
  s.q3 = quantile_sorted(sorted, 0.75);
  s.values = std::move(values);
  return s;
}

EvaluationSummary median_evaluate(const Recipe& recipe, const Dataset& ds,
                                  const SplitPlan& plan, std::string metric) {
  return run_repetitions(recipe, plan, std::move(metric),
                         [&](std::size_t rep) { return split(ds, plan, rep); });
}

EvaluationSummary median_evaluate(const Recipe& recipe,
                                  const FriedmanSpec& spec,
                                  const SplitPlan& plan, std::string metric) {
  return run_repetitions(recipe, plan, std::move(metric), [&](std::size_t rep) {
    return generate_pair(spec, plan, rep);
  });
}

}  // namespace anova
