#include "anova/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "anova/design_operator.hpp"
#include "anova/error.hpp"

namespace anova {

namespace {

std::string format_term(const Term& u) {
  std::string s = "{";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(u[i] + 1);
  }
  return s + "}";
}

void check_nodes(const Matrix& nodes, std::size_t dimension) {
  if (nodes.rows() > 0 && nodes.cols() != dimension) {
    throw Error(ErrorCode::DimensionMismatch,
                "nodes have " + std::to_string(nodes.cols()) +
                    " columns, model dimension is " +
                    std::to_string(dimension));
  }
}

}  // namespace

Model::Model(BasisKind kind, TermSet terms, BandwidthProfile bandwidths,
             std::vector<Complex> coefficients, double lambda,
             FitDiagnostics diagnostics)
    : kind_(kind),
      terms_(std::move(terms)),
      bandwidths_(std::move(bandwidths)),
      index_(build_index_union(terms_, bandwidths_, kind_)),
      coefficients_(std::move(coefficients)),
      lambda_(lambda),
      diagnostics_(std::move(diagnostics)) {
  if (coefficients_.size() != index_.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "model has " + std::to_string(coefficients_.size()) +
                    " coefficients but |I(U)| = " +
                    std::to_string(index_.size()));
  }
  if (is_real(kind_)) {
    for (const Complex& c : coefficients_) {
      if (c.imag() != 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "real basis model with complex coefficients");
      }
    }
  }
}

std::vector<Complex> Model::evaluate(
    const Matrix& nodes, std::span<const Complex> coefficients) const {
  check_nodes(nodes, dimension());
  if (is_real(kind_)) {
    std::vector<double> real(coefficients.size());
    for (std::size_t i = 0; i < real.size(); ++i) real[i] = coefficients[i].real();
    DesignOperator<double> op(kind_, nodes, index_);
    const std::vector<double> values = op.apply(real);
    return {values.begin(), values.end()};
  }
  DesignOperator<Complex> op(kind_, nodes, index_);
  return op.apply(coefficients);
}

std::vector<Complex> Model::predict_complex(const Matrix& nodes) const {
  return evaluate(nodes, coefficients_);
}

std::vector<double> Model::predict(const Matrix& nodes) const {
  const std::vector<Complex> values = predict_complex(nodes);
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](const Complex& v) { return v.real(); });
  return out;
}

std::vector<double> Model::predict_term(const Term& u,
                                        const Matrix& nodes) const {
  const auto pos = terms_.index_of(u);
  if (!pos) {
    throw Error(ErrorCode::UnknownTerm,
                "term " + format_term(u) + " is not part of the model");
  }
  const auto& group = index_.groups()[*pos];
  std::vector<Complex> masked(coefficients_.size(), Complex{});
  std::copy_n(coefficients_.begin() + static_cast<std::ptrdiff_t>(group.first),
              group.count,
              masked.begin() + static_cast<std::ptrdiff_t>(group.first));
  const std::vector<Complex> values = evaluate(nodes, masked);
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [](const Complex& v) { return v.real(); });
  return out;
}

double Model::variance() const noexcept {
  double total = 0.0;
  for (const auto& group : index_.groups()) {
    if (group.term.empty()) continue;
    for (std::size_t c = group.first; c < group.first + group.count; ++c) {
      total += std::norm(coefficients_[c]);
    }
  }
  return total;
}

double Model::term_variance(const Term& u) const {
  const auto pos = terms_.index_of(u);
  if (!pos) {
    throw Error(ErrorCode::UnknownTerm,
                "term " + format_term(u) + " is not part of the model");
  }
  if (u.empty()) return 0.0;
  const auto& group = index_.groups()[*pos];
  double total = 0.0;
  for (std::size_t c = group.first; c < group.first + group.count; ++c) {
    total += std::norm(coefficients_[c]);
  }
  return total;
}

Model fit(const Matrix& nodes, std::span<const double> values,
          const TermSet& terms, const BandwidthProfile& bandwidths,
          BasisKind kind, const SolverConfig& cfg) {
  if (nodes.rows() == 0 || values.empty()) {
    throw Error(ErrorCode::EmptySystem, "no training data");
  }
  if (nodes.rows() != values.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(nodes.rows()) + " nodes but " +
                    std::to_string(values.size()) + " values");
  }
  check_nodes(nodes, terms.dimension());

  FrequencyIndexUnion index = build_index_union(terms, bandwidths, kind);
  FitDiagnostics diag;
  diag.oversampling =
      static_cast<double>(nodes.rows()) / static_cast<double>(index.size());
  if (diag.oversampling <= 1.0) {
    std::ostringstream msg;
    msg << "oversampling M/|I(U)| = " << nodes.rows() << "/" << index.size()
        << " <= 1; the system is likely rank deficient";
    diag.warnings.push_back(msg.str());
  }

  std::vector<Complex> coefficients;
  if (is_real(kind)) {
    DesignOperator<double> op(kind, nodes, std::move(index));
    const auto result = lsqr_solve(op, values, cfg);
    coefficients.assign(result.x.begin(), result.x.end());
    diag.iterations = result.iterations;
    diag.relative_residual = result.relative_residual;
    diag.stop = result.stop;
  } else {
    DesignOperator<Complex> op(kind, nodes, std::move(index));
    const std::vector<Complex> rhs(values.begin(), values.end());
    const auto result = lsqr_solve(op, std::span<const Complex>(rhs), cfg);
    coefficients = result.x;
    diag.iterations = result.iterations;
    diag.relative_residual = result.relative_residual;
    diag.stop = result.stop;
  }
  if (diag.stop == StopReason::IterationLimit) {
    diag.warnings.push_back("LSQR stopped at the iteration limit (" +
                            std::to_string(diag.iterations) + ")");
  }
  return Model(kind, terms, bandwidths, std::move(coefficients), cfg.lambda,
               std::move(diag));
}

SensitivityReport gsi(const Model& model) {
  SensitivityReport report;
  report.variance = model.variance();
  if (!(report.variance > 0.0)) {
    throw Error(ErrorCode::DegenerateModel,
                "model has zero variance; sensitivity indices are undefined");
  }
  for (const Term& u : model.terms()) {
    if (u.empty()) continue;
    report.gsi.push_back({u, model.term_variance(u) / report.variance});
  }
  return report;
}

std::vector<double> attribute_ranking(const SensitivityReport& report,
                                      const TermSet& terms) {
  const std::size_t d = terms.dimension();
  // count[l][i] = |{v in U : |v| = l, i in v}|
  std::vector<std::vector<std::size_t>> count(terms.max_order() + 1,
                                              std::vector<std::size_t>(d, 0));
  for (const Term& v : terms) {
    for (std::size_t i : v) ++count[v.size()][i];
  }

  std::vector<double> ranking(d, 0.0);
  double normalizer = 0.0;
  for (const auto& [u, rho] : report.gsi) {
    if (u.size() >= count.size()) {
      throw Error(ErrorCode::UnknownTerm,
                  "report term " + format_term(u) + " is not in the term set");
    }
    for (std::size_t i : u) {
      const std::size_t c = count[u.size()][i];
      if (c == 0) {
        throw Error(ErrorCode::UnknownTerm,
                    "report term " + format_term(u) + " is not in the term set");
      }
      const double share = rho / static_cast<double>(c);
      ranking[i] += share;
      normalizer += share;
    }
  }
  if (!(normalizer > 0.0)) {
    throw Error(ErrorCode::DegenerateModel,
                "all sensitivity indices vanish; ranking is undefined");
  }
  for (double& r : ranking) r /= normalizer;
  return ranking;
}

SensitivityReport analyze(const Model& model) {
  SensitivityReport report = gsi(model);
  report.ranking = attribute_ranking(report, model.terms());
  return report;
}

std::vector<TermSensitivity> by_importance(const SensitivityReport& report) {
  std::vector<TermSensitivity> sorted = report.gsi;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TermSensitivity& a, const TermSensitivity& b) {
                     if (a.rho != b.rho) return a.rho > b.rho;
                     return term_less(a.term, b.term);
                   });
  return sorted;
}

void RefinementConfig::validate(std::size_t ds, std::size_t dimension) const {
  if (!epsilon.empty() && epsilon.size() < ds) {
    throw Error(ErrorCode::MissingThreshold,
                "threshold vector has " + std::to_string(epsilon.size()) +
                    " entries, need " + std::to_string(ds));
  }
  for (double e : epsilon) {
    if (!(e > 0.0 && e < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "thresholds must lie in (0, 1)");
    }
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, 1)");
  }
  if (!(expansion_order > ds && expansion_order < dimension)) {
    throw Error(ErrorCode::InvalidArgument,
                "expansion order " + std::to_string(expansion_order) +
                    " must satisfy d_s = " + std::to_string(ds) +
                    " < n_v < d = " + std::to_string(dimension));
  }
}

TermSet threshold_active_set(const SensitivityReport& report,
                             const TermSet& terms,
                             std::span<const double> epsilon) {
  std::vector<Term> kept;
  for (const auto& [u, rho] : report.gsi) {
    if (!terms.contains(u)) continue;
    if (u.size() > epsilon.size()) {
      throw Error(ErrorCode::MissingThreshold,
                  "no threshold for terms of order " +
                      std::to_string(u.size()));
    }
    if (rho > epsilon[u.size() - 1]) kept.push_back(u);
  }
  TermSet out(terms.dimension(), std::move(kept));
  if (auto ds = terms.superposition_threshold()) {
    out.set_superposition_threshold(*ds);
  }
  return out;
}

TermSet drop_variables(const TermSet& terms, const Term& keep) {
  if (keep.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "at least one variable must be kept");
  }
  Term sorted_keep = keep;
  std::sort(sorted_keep.begin(), sorted_keep.end());
  std::vector<Term> kept;
  for (const Term& u : terms) {
    if (is_subset(u, sorted_keep)) kept.push_back(u);
  }
  TermSet out(terms.dimension(), std::move(kept));
  if (auto ds = terms.superposition_threshold()) {
    out.set_superposition_threshold(*ds);
  }
  return out;
}

Term important_variables(std::span<const double> ranking, double theta) {
  Term v;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (ranking[i] > theta) v.push_back(i);
  }
  return v;
}

ExpansionResult incremental_expand(const SensitivityReport& report,
                                   const TermSet& terms,
                                   const RefinementConfig& cfg) {
  const std::size_t ds =
      terms.superposition_threshold().value_or(terms.max_order());
  const std::size_t d = terms.dimension();
  cfg.validate(ds, d);
  const double theta = cfg.theta;
  const std::size_t expansion_order = cfg.expansion_order;
  if (report.ranking.size() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "ranking has " + std::to_string(report.ranking.size()) +
                    " entries for dimension " + std::to_string(d));
  }

  ExpansionResult result{terms, {}, std::nullopt};
  const Term v = important_variables(report.ranking, theta);
  if (v.empty()) {
    result.notice = "no variable has a ranking above theta; term set unchanged";
    return result;
  }

  std::vector<Term> all(terms.begin(), terms.end());
  const std::size_t n = v.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    const auto order = static_cast<std::size_t>(std::popcount(mask));
    if (order <= ds || order > expansion_order) continue;
    Term u;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) u.push_back(v[i]);
    }
    if (!terms.contains(u)) result.added.push_back(u);
    all.push_back(std::move(u));
  }
  std::sort(result.added.begin(), result.added.end(), term_less);
  result.terms = TermSet(d, std::move(all));
  if (auto threshold = terms.superposition_threshold()) {
    result.terms.set_superposition_threshold(*threshold);
  }
  if (result.added.empty()) {
    result.notice = "important variables admit no new interactions";
  }
  return result;
}

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "metric inputs differ in length");
  }
  if (a.empty()) {
    throw Error(ErrorCode::EmptySystem, "metric inputs are empty");
  }
}

}  // namespace

double mse(std::span<const double> reference, std::span<const double> approx) {
  check_pair(reference, approx);
  double sum = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = reference[i] - approx[i];
    sum += e * e;
  }
  return sum / static_cast<double>(reference.size());
}

double rmse(std::span<const double> reference, std::span<const double> approx) {
  return std::sqrt(mse(reference, approx));
}

double relative_error(std::span<const double> reference,
                      std::span<const double> approx) {
  check_pair(reference, approx);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double e = reference[i] - approx[i];
    num += e * e;
    den += reference[i] * reference[i];
  }
  if (den == 0.0) {
    throw Error(ErrorCode::UndefinedReference,
                "relative error against an all-zero reference");
  }
  return std::sqrt(num / den);
}

}  // namespace anova
