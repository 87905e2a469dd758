#pragma once

// Damped LSQR (Paige & Saunders, ACM TOMS 8(1), 1982):
//
//   minimize ||y - A x||^2 + lambda ||x||^2
//
// i.e. the least-squares problem for [A; sqrt(lambda) I] x = [y; 0].
// Only products with A and A^* are needed. Complex operators work
// unchanged: the bidiagonalization scalars alpha, beta stay real.

#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "anova/error.hpp"

namespace anova {

struct SolverConfig {
  double lambda = 0.0;
  // Defaults to 10 * columns when unset.
  std::optional<std::size_t> max_iterations;
  double tolerance = 1e-8;
  // Keep the damped residual norm of every iterate.
  bool record_history = false;

  void validate() const;
};

enum class StopReason {
  ZeroSolution,        // A^* y = 0, x = 0 is exact
  ResidualTolerance,   // ||r|| small relative to ||y||
  LeastSquaresTolerance,  // ||A^* r|| small relative to ||A|| ||r||
  MachinePrecision,
  IterationLimit,
};

std::string_view to_string(StopReason reason) noexcept;

template <class Scalar>
struct LsqrResult {
  std::vector<Scalar> x;
  std::size_t iterations = 0;
  // sqrt(||y - A x||^2 + lambda ||x||^2) / ||y||
  double relative_residual = 0.0;
  StopReason stop = StopReason::IterationLimit;
  std::vector<double> residual_history;

  bool converged() const noexcept { return stop != StopReason::IterationLimit; }
};

template <class Op>
concept LinearOperator = requires(const Op& op,
                                  std::span<const typename Op::scalar_type> v) {
  typename Op::scalar_type;
  { op.rows() } -> std::convertible_to<std::size_t>;
  { op.cols() } -> std::convertible_to<std::size_t>;
  { op.apply(v) } -> std::same_as<std::vector<typename Op::scalar_type>>;
  { op.apply_adjoint(v) } -> std::same_as<std::vector<typename Op::scalar_type>>;
};

namespace detail {

inline double abs2(double v) noexcept { return v * v; }
inline double abs2(const std::complex<double>& v) noexcept {
  return std::norm(v);
}

template <class Scalar>
double norm2(const std::vector<Scalar>& v) noexcept {
  // scaled accumulation guards against overflow for large residuals
  double scale = 0.0;
  double ssq = 1.0;
  for (const Scalar& s : v) {
    double parts[2];
    if constexpr (std::is_same_v<Scalar, double>) {
      parts[0] = s;
      parts[1] = 0.0;
    } else {
      parts[0] = s.real();
      parts[1] = s.imag();
    }
    for (double p : parts) {
      const double a = std::abs(p);
      if (a == 0.0) continue;
      if (scale < a) {
        ssq = 1.0 + ssq * (scale / a) * (scale / a);
        scale = a;
      } else {
        ssq += (a / scale) * (a / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

template <class Scalar>
bool all_finite(std::span<const Scalar> v) noexcept {
  for (const Scalar& s : v) {
    if constexpr (std::is_same_v<Scalar, double>) {
      if (!std::isfinite(s)) return false;
    } else {
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return false;
    }
  }
  return true;
}

}  // namespace detail

template <LinearOperator Op>
LsqrResult<typename Op::scalar_type> lsqr_solve(
    const Op& op, std::span<const typename Op::scalar_type> y,
    const SolverConfig& cfg) {
  using Scalar = typename Op::scalar_type;
  cfg.validate();
  const std::size_t m = op.rows();
  const std::size_t n = op.cols();
  if (m == 0 || n == 0) {
    throw Error(ErrorCode::EmptySystem, "least-squares system has no rows or columns");
  }
  if (y.size() != m) {
    throw Error(ErrorCode::LengthMismatch,
                "right-hand side has length " + std::to_string(y.size()) +
                    ", expected " + std::to_string(m));
  }
  if (!detail::all_finite(y)) {
    throw Error(ErrorCode::NonFinite, "right-hand side contains non-finite values");
  }

  const std::size_t iter_limit = cfg.max_iterations.value_or(10 * n);
  const double damp = std::sqrt(cfg.lambda);
  const double dampsq = cfg.lambda;
  const double atol = cfg.tolerance;
  const double btol = cfg.tolerance;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  LsqrResult<Scalar> result;
  result.x.assign(n, Scalar{0.0});

  std::vector<Scalar> u(y.begin(), y.end());
  const double bnorm = detail::norm2(u);
  double beta = bnorm;
  if (beta == 0.0) {
    result.stop = StopReason::ZeroSolution;
    if (cfg.record_history) result.residual_history.push_back(0.0);
    return result;
  }
  for (auto& e : u) e /= beta;
  std::vector<Scalar> v = op.apply_adjoint(std::span<const Scalar>(u));
  double alpha = detail::norm2(v);
  if (alpha > 0.0) {
    for (auto& e : v) e /= alpha;
  }
  std::vector<Scalar> w = v;

  double rhobar = alpha;
  double phibar = beta;
  double anorm = 0.0;
  double ddnorm = 0.0;
  double res2 = 0.0;
  double xnorm = 0.0;
  double xxnorm = 0.0;
  double z = 0.0;
  double cs2 = -1.0;
  double sn2 = 0.0;
  double rnorm = beta;
  double arnorm = alpha * beta;

  if (cfg.record_history) result.residual_history.push_back(rnorm);
  if (arnorm == 0.0) {
    result.stop = StopReason::ZeroSolution;
    result.relative_residual = 1.0;
    return result;
  }

  std::size_t itn = 0;
  while (true) {
    if (itn >= iter_limit) {
      result.stop = StopReason::IterationLimit;
      break;
    }
    ++itn;

    // bidiagonalization step
    {
      std::vector<Scalar> av = op.apply(std::span<const Scalar>(v));
      for (std::size_t i = 0; i < m; ++i) u[i] = av[i] - alpha * u[i];
    }
    beta = detail::norm2(u);
    if (beta > 0.0) {
      for (auto& e : u) e /= beta;
      anorm = std::sqrt(anorm * anorm + alpha * alpha + beta * beta + dampsq);
      std::vector<Scalar> atu = op.apply_adjoint(std::span<const Scalar>(u));
      for (std::size_t j = 0; j < n; ++j) v[j] = atu[j] - beta * v[j];
      alpha = detail::norm2(v);
      if (alpha > 0.0) {
        for (auto& e : v) e /= alpha;
      }
    }

    // eliminate the damping row
    double rhobar1 = rhobar;
    double psi = 0.0;
    if (damp > 0.0) {
      rhobar1 = std::hypot(rhobar, damp);
      const double cs1 = rhobar / rhobar1;
      const double sn1 = damp / rhobar1;
      psi = sn1 * phibar;
      phibar = cs1 * phibar;
    }

    // eliminate the subdiagonal
    const double rho = std::hypot(rhobar1, beta);
    const double cs = rhobar1 / rho;
    const double sn = beta / rho;
    const double theta = sn * alpha;
    rhobar = -cs * alpha;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    const double tau = sn * phi;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    double dknorm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Scalar dk = w[j] / rho;
      dknorm2 += detail::abs2(dk);
      result.x[j] += t1 * w[j];
      w[j] = v[j] + t2 * w[j];
    }
    ddnorm += dknorm2;

    // running estimate of ||x||
    const double delta = sn2 * rho;
    const double gambar = -cs2 * rho;
    const double rhs = phi - delta * z;
    const double zbar = rhs / gambar;
    xnorm = std::sqrt(xxnorm + zbar * zbar);
    const double gamma = std::hypot(gambar, theta);
    cs2 = gambar / gamma;
    sn2 = theta / gamma;
    z = rhs / gamma;
    xxnorm += z * z;

    const double acond = anorm * std::sqrt(ddnorm);
    res2 += psi * psi;
    rnorm = std::sqrt(phibar * phibar + res2);
    arnorm = alpha * std::abs(tau);
    if (cfg.record_history) result.residual_history.push_back(rnorm);

    const double test1 = rnorm / bnorm;
    const double test2 = arnorm / (anorm * rnorm + eps);
    const double test3 = 1.0 / (acond + eps);
    const double scaled1 = test1 / (1.0 + anorm * xnorm / bnorm);
    const double rtol = btol + atol * anorm * xnorm / bnorm;

    if (1.0 + test3 <= 1.0 || 1.0 + test2 <= 1.0 || 1.0 + scaled1 <= 1.0) {
      result.stop = StopReason::MachinePrecision;
      break;
    }
    if (test2 <= atol) {
      result.stop = StopReason::LeastSquaresTolerance;
      break;
    }
    if (test1 <= rtol) {
      result.stop = StopReason::ResidualTolerance;
      break;
    }
  }

  result.iterations = itn;
  result.relative_residual = rnorm / bnorm;
  return result;
}

}  // namespace anova
