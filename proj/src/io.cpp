#include "anova/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "anova/error.hpp"

namespace anova::io {

namespace {

[[noreturn]] void bad_format(const std::string& what) {
  throw Error(ErrorCode::Parse, what);
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

json to_json(const Term& term) {
  json arr = json::array();
  for (std::size_t i : term) arr.push_back(i + 1);
  return arr;
}

Term term_from_json(const json& j, std::size_t dimension) {
  if (!j.is_array()) bad_format("term must be an array of variable indices");
  Term u;
  for (const json& e : j) {
    if (!e.is_number_integer() || e.get<long long>() < 1) {
      bad_format("variable indices are positive integers (1-based)");
    }
    const auto i = e.get<std::size_t>();
    if (i > dimension) {
      bad_format("variable " + std::to_string(i) + " exceeds dimension " +
                 std::to_string(dimension));
    }
    u.push_back(i - 1);
  }
  std::sort(u.begin(), u.end());
  return u;
}

json to_json(const TermSet& terms) {
  json arr = json::array();
  for (const Term& u : terms) arr.push_back(to_json(u));
  return arr;
}

TermSet term_set_from_json(const json& j, std::size_t dimension) {
  if (!j.is_array()) bad_format("term set must be an array of arrays");
  std::vector<Term> terms;
  for (const json& e : j) terms.push_back(term_from_json(e, dimension));
  return TermSet(dimension, std::move(terms));
}

json to_json(const BandwidthProfile& bandwidths) {
  json obj = json::object();
  for (const auto& [order, n] : bandwidths.by_order()) {
    obj[std::to_string(order)] = n;
  }
  return obj;
}

BandwidthProfile bandwidths_from_json(const json& j) {
  if (!j.is_object()) bad_format("bandwidths must be an object {\"1\": N1, ...}");
  std::map<std::size_t, int> by_order;
  for (const auto& [key, value] : j.items()) {
    std::size_t order = 0;
    try {
      order = std::stoul(key);
    } catch (const std::exception&) {
      bad_format("bandwidth key '" + key + "' is not an order");
    }
    if (!value.is_number_integer()) bad_format("bandwidths are integers");
    by_order[order] = value.get<int>();
  }
  return BandwidthProfile(std::move(by_order));
}

json to_json(const Normalization& stats) {
  json j{{"min", stats.min}, {"max", stats.max}};
  if (stats.target) {
    j["target"] = {stats.target->first, stats.target->second};
  }
  return j;
}

Normalization normalization_from_json(const json& j) {
  Normalization n;
  n.min = j.at("min").get<std::vector<double>>();
  n.max = j.at("max").get<std::vector<double>>();
  if (n.min.size() != n.max.size()) bad_format("normalization min/max differ");
  if (j.contains("target")) {
    const auto t = j.at("target").get<std::vector<double>>();
    if (t.size() != 2) bad_format("target normalization is [min, max]");
    n.target = std::make_pair(t[0], t[1]);
  }
  return n;
}

json to_json(const ModelFile& file) {
  const Model& m = file.model;
  json coefficients = json::array();
  for (const Complex& c : m.coefficients()) {
    if (is_real(m.kind())) {
      coefficients.push_back(c.real());
    } else {
      coefficients.push_back({c.real(), c.imag()});
    }
  }
  json j{
      {"basis", std::string(basis_token(m.kind()))},
      {"dimension", m.dimension()},
      {"terms", to_json(m.terms())},
      {"bandwidths", to_json(m.bandwidths())},
      {"lambda", m.lambda()},
      {"coefficients", std::move(coefficients)},
      {"diagnostics",
       {{"iterations", m.diagnostics().iterations},
        {"relative_residual", m.diagnostics().relative_residual},
        {"stop", std::string(to_string(m.diagnostics().stop))},
        {"oversampling", m.diagnostics().oversampling}}},
  };
  if (m.terms().superposition_threshold()) {
    j["superposition_threshold"] = *m.terms().superposition_threshold();
  }
  if (file.normalization) j["normalization"] = to_json(*file.normalization);
  if (!file.columns.empty()) j["columns"] = file.columns;
  if (!file.target_name.empty()) j["target"] = file.target_name;
  return j;
}

ModelFile model_file_from_json(const json& j) {
  try {
    const BasisKind kind = parse_basis(j.at("basis").get<std::string>());
    const auto dimension = j.at("dimension").get<std::size_t>();
    TermSet terms = term_set_from_json(j.at("terms"), dimension);
    if (j.contains("superposition_threshold")) {
      terms.set_superposition_threshold(
          j.at("superposition_threshold").get<std::size_t>());
    }
    BandwidthProfile bandwidths = bandwidths_from_json(j.at("bandwidths"));
    std::vector<Complex> coefficients;
    for (const json& c : j.at("coefficients")) {
      if (c.is_number()) {
        coefficients.emplace_back(c.get<double>(), 0.0);
      } else if (c.is_array() && c.size() == 2) {
        coefficients.emplace_back(c[0].get<double>(), c[1].get<double>());
      } else {
        bad_format("coefficients are numbers or [re, im] pairs");
      }
    }
    FitDiagnostics diag;
    if (j.contains("diagnostics")) {
      const json& d = j.at("diagnostics");
      diag.iterations = d.value("iterations", std::size_t{0});
      diag.relative_residual = d.value("relative_residual", 0.0);
      diag.oversampling = d.value("oversampling", 0.0);
      const std::string stop = d.value("stop", std::string{});
      for (StopReason r :
           {StopReason::ZeroSolution, StopReason::ResidualTolerance,
            StopReason::LeastSquaresTolerance, StopReason::MachinePrecision,
            StopReason::IterationLimit}) {
        if (to_string(r) == stop) diag.stop = r;
      }
    }
    ModelFile file{Model(kind, std::move(terms), std::move(bandwidths),
                         std::move(coefficients), j.at("lambda").get<double>(),
                         std::move(diag)),
                   std::nullopt,
                   {},
                   {}};
    if (j.contains("normalization")) {
      file.normalization = normalization_from_json(j.at("normalization"));
    }
    if (j.contains("columns")) {
      file.columns = j.at("columns").get<std::vector<std::string>>();
    }
    file.target_name = j.value("target", std::string{});
    return file;
  } catch (const json::exception& e) {
    bad_format(std::string("malformed model file: ") + e.what());
  }
}

json to_json(const SensitivityReport& report) {
  json gsi = json::array();
  for (const auto& [term, rho] : report.gsi) {
    gsi.push_back({{"term", to_json(term)}, {"rho", rho}});
  }
  return {{"variance", report.variance},
          {"gsi", std::move(gsi)},
          {"ranking", report.ranking}};
}

SensitivityReport report_from_json(const json& j) {
  try {
    SensitivityReport report;
    report.variance = j.at("variance").get<double>();
    report.ranking = j.at("ranking").get<std::vector<double>>();
    const std::size_t d =
        report.ranking.empty() ? std::numeric_limits<std::size_t>::max()
                               : report.ranking.size();
    for (const json& e : j.at("gsi")) {
      report.gsi.push_back(
          {term_from_json(e.at("term"), d), e.at("rho").get<double>()});
    }
    return report;
  } catch (const json::exception& e) {
    bad_format(std::string("malformed report: ") + e.what());
  }
}

json to_json(const EvaluationSummary& summary) {
  return {{"metric", summary.metric},   {"median", summary.median},
          {"q1", summary.q1},           {"q3", summary.q3},
          {"repetitions", summary.repetitions},
          {"failures", summary.failures}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad_format("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

std::string term_label(const Term& term) {
  std::string s = "{";
  for (std::size_t i = 0; i < term.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(term[i] + 1);
  }
  return s + "}";
}

std::string format_report_table(const SensitivityReport& report) {
  std::ostringstream os;
  os << "variance " << std::setprecision(6) << report.variance << "\n\n";
  if (!report.ranking.empty()) {
    os << "variable  ranking\n";
    for (std::size_t i = 0; i < report.ranking.size(); ++i) {
      os << std::setw(8) << (i + 1) << "  " << fixed(report.ranking[i], 6)
         << "\n";
    }
    os << "\n";
  }
  std::size_t width = 4;
  const auto sorted = by_importance(report);
  for (const auto& t : sorted) width = std::max(width, term_label(t.term).size());
  os << std::left << std::setw(static_cast<int>(width)) << "term" << "  gsi\n";
  for (const auto& t : sorted) {
    os << std::left << std::setw(static_cast<int>(width)) << term_label(t.term)
       << "  " << fixed(t.rho, 6) << "\n";
  }
  return os.str();
}

namespace {

std::string bar_chart(const std::vector<std::pair<std::string, double>>& bars,
                      const std::string& ylabel,
                      std::optional<double> threshold) {
  const double width = 60.0 + 40.0 * static_cast<double>(bars.size());
  const double height = 320.0;
  const double left = 50.0;
  const double top = 20.0;
  const double plot_h = 240.0;
  double ymax = threshold.value_or(0.0);
  for (const auto& [label, v] : bars) ymax = std::max(ymax, v);
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\">\n";
  os << "<text x=\"12\" y=\"" << top + plot_h / 2
     << "\" font-size=\"12\" transform=\"rotate(-90 12," << top + plot_h / 2
     << ")\">" << ylabel << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
     << width - 10 << "\" y2=\"" << top + plot_h
     << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double x = left + 20.0 + 40.0 * static_cast<double>(i);
    const double h = plot_h * bars[i].second / ymax;
    os << "<rect x=\"" << x - 8 << "\" y=\"" << fixed(top + plot_h - h, 2)
       << "\" width=\"16\" height=\"" << fixed(h, 2)
       << "\" fill=\"steelblue\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << top + plot_h + 16
       << "\" font-size=\"10\" text-anchor=\"middle\">" << bars[i].first
       << "</text>\n";
  }
  if (threshold) {
    const double y = top + plot_h - plot_h * *threshold / ymax;
    os << "<line x1=\"" << left << "\" y1=\"" << fixed(y, 2) << "\" x2=\""
       << width - 10 << "\" y2=\"" << fixed(y, 2)
       << "\" stroke=\"red\" stroke-dasharray=\"6,4\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string ranking_svg(const std::vector<double>& ranking,
                        std::optional<double> threshold) {
  std::vector<std::pair<std::string, double>> bars;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    bars.emplace_back(std::to_string(i + 1), ranking[i]);
  }
  return bar_chart(bars, "r(i)", threshold);
}

std::string gsi_svg(const SensitivityReport& report,
                    std::optional<double> threshold) {
  std::vector<std::pair<std::string, double>> bars;
  for (const auto& [term, rho] : report.gsi) {
    bars.emplace_back(term_label(term), rho);
  }
  return bar_chart(bars, "gsi", threshold);
}

}  // namespace anova::io
