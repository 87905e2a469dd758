#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anova/basis.hpp"
#include "anova/lsqr.hpp"
#include "anova/matrix.hpp"
#include "anova/terms.hpp"

namespace anova {

struct FitDiagnostics {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  StopReason stop = StopReason::IterationLimit;
  double oversampling = 0.0;
  std::vector<std::string> warnings;
};

// Truncated ANOVA expansion sum_{k in I(U)} fhat_k phi_k(x).
//
// Coefficients are stored as complex numbers for every basis; for the real
// systems the imaginary parts are exactly zero.
class Model {
 public:
  Model(BasisKind kind, TermSet terms, BandwidthProfile bandwidths,
        std::vector<Complex> coefficients, double lambda,
        FitDiagnostics diagnostics = {});

  BasisKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return terms_.dimension(); }
  const TermSet& terms() const noexcept { return terms_; }
  const BandwidthProfile& bandwidths() const noexcept { return bandwidths_; }
  const FrequencyIndexUnion& index() const noexcept { return index_; }
  const std::vector<Complex>& coefficients() const noexcept {
    return coefficients_;
  }
  double lambda() const noexcept { return lambda_; }
  const FitDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  // Real part of the expansion at every row of nodes.
  std::vector<double> predict(const Matrix& nodes) const;
  std::vector<Complex> predict_complex(const Matrix& nodes) const;
  // Partial sum over the frequencies with supp k = u.
  std::vector<double> predict_term(const Term& u, const Matrix& nodes) const;

  // sigma^2 = sum_{k != 0} |fhat_k|^2
  double variance() const noexcept;
  // sum of |fhat_k|^2 over the frequencies of one term
  double term_variance(const Term& u) const;

 private:
  std::vector<Complex> evaluate(const Matrix& nodes,
                                std::span<const Complex> coefficients) const;

  BasisKind kind_;
  TermSet terms_;
  BandwidthProfile bandwidths_;
  FrequencyIndexUnion index_;
  std::vector<Complex> coefficients_;
  double lambda_;
  FitDiagnostics diagnostics_;
};

// Solves min ||y - F(X, I(U)) g||^2 + lambda ||g||^2 with LSQR.
Model fit(const Matrix& nodes, std::span<const double> values,
          const TermSet& terms, const BandwidthProfile& bandwidths,
          BasisKind kind, const SolverConfig& cfg);

struct TermSensitivity {
  Term term;
  double rho = 0.0;
};

struct SensitivityReport {
  double variance = 0.0;
  // one entry per nonempty term, in TermSet order
  std::vector<TermSensitivity> gsi;
  // r(i), i = 0..d-1; empty until attribute_ranking has run
  std::vector<double> ranking;
};

// rho(u) = sigma^2(f_u) / sigma^2(f). Throws DegenerateModel when the model
// is constant.
SensitivityReport gsi(const Model& model);

// Attribute ranking r(i): every rho(u) is shared among its variables with
// weight 1 / |{v in U : |v| = |u|, i in v}|, then normalized to sum 1.
std::vector<double> attribute_ranking(const SensitivityReport& report,
                                      const TermSet& terms);

// gsi followed by attribute_ranking.
SensitivityReport analyze(const Model& model);

// GSI entries by decreasing rho; ties keep term order.
std::vector<TermSensitivity> by_importance(const SensitivityReport& report);

struct RefinementConfig {
  std::vector<double> epsilon;  // epsilon[l-1] applies to order l; optional
  double theta = 0.5;
  std::size_t expansion_order = 0;  // n_v

  // Range checks; epsilon is checked only when present.
  void validate(std::size_t ds, std::size_t dimension) const;
};

// {empty} plus every term with rho(u) > epsilon_{|u|}. Terms of the input
// set that are missing from the report are dropped.
TermSet threshold_active_set(const SensitivityReport& report,
                             const TermSet& terms,
                             std::span<const double> epsilon);

// Keeps only the terms contained in keep (0-based variable indices).
TermSet drop_variables(const TermSet& terms, const Term& keep);

// Variables whose ranking exceeds theta, ascending.
Term important_variables(std::span<const double> ranking, double theta);

struct ExpansionResult {
  TermSet terms;
  std::vector<Term> added;
  std::optional<std::string> notice;
};

// U plus all subsets u of v = {i : r(i) > theta} with d_s < |u| <= n_v,
// where d_s is the set's superposition threshold (else its largest order).
ExpansionResult incremental_expand(const SensitivityReport& report,
                                   const TermSet& terms,
                                   const RefinementConfig& cfg);

double mse(std::span<const double> reference, std::span<const double> approx);
double rmse(std::span<const double> reference, std::span<const double> approx);
// sqrt(sum |f - g|^2 / sum |f|^2)
double relative_error(std::span<const double> reference,
                      std::span<const double> approx);

}  // namespace anova
