#include "anova/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anova/error.hpp"

namespace anova {

bool is_periodic(BasisKind kind) noexcept {
  return kind == BasisKind::Exponential;
}

bool is_real(BasisKind kind) noexcept { return !is_periodic(kind); }

BasisKind parse_basis(std::string_view token) {
  if (token == "per") return BasisKind::Exponential;
  if (token == "cos") return BasisKind::Cosine;
  if (token == "cheb") return BasisKind::Chebyshev;
  throw Error(ErrorCode::InvalidArgument,
              "unknown basis '" + std::string(token) +
                  "' (expected per, cos or cheb)");
}

std::string_view basis_token(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::Exponential:
      return "per";
    case BasisKind::Cosine:
      return "cos";
    case BasisKind::Chebyshev:
      return "cheb";
  }
  return "cos";
}

namespace basis {

double wrap_torus(double x) noexcept {
  double w = x - std::floor(x + 0.5);
  // floor can round x + 0.5 up to an integer for x just below 0.5
  if (w >= 0.5) w -= 1.0;
  return w;
}

void check_domain(BasisKind kind, double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::DomainViolation, "non-finite coordinate");
  }
  if (is_periodic(kind)) return;
  if (x < 0.0 || x > 1.0) {
    throw Error(ErrorCode::DomainViolation,
                "coordinate " + std::to_string(x) + " outside [0, 1]");
  }
}

namespace {

void check_frequency(BasisKind kind, int k) {
  if (k < 0 && !is_periodic(kind)) {
    throw Error(ErrorCode::InvalidFrequency,
                "negative frequency " + std::to_string(k) +
                    " for a nonperiodic basis");
  }
}

double real_value(BasisKind kind, int k, double x) {
  if (k == 0) return 1.0;
  if (kind == BasisKind::Cosine) {
    return std::numbers::sqrt2 * std::cos(std::numbers::pi * k * x);
  }
  const double t = std::clamp(2.0 * x - 1.0, -1.0, 1.0);
  return std::numbers::sqrt2 * std::cos(k * std::acos(t));
}

}  // namespace

double eval_1d_real(BasisKind kind, int k, double x) {
  if (is_periodic(kind)) {
    throw Error(ErrorCode::InvalidArgument,
                "real evaluation requested for the exponential system");
  }
  check_frequency(kind, k);
  check_domain(kind, x);
  return real_value(kind, k, x);
}

Complex eval_1d(BasisKind kind, int k, double x) {
  if (!is_periodic(kind)) return {eval_1d_real(kind, k, x), 0.0};
  check_domain(kind, x);
  if (k == 0) return {1.0, 0.0};
  const double angle = 2.0 * std::numbers::pi * k * wrap_torus(x);
  return {std::cos(angle), std::sin(angle)};
}

Complex eval_tensor(BasisKind kind, std::span<const int> k,
                    std::span<const double> x) {
  if (k.size() != x.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "frequency has " + std::to_string(k.size()) +
                    " entries but node has " + std::to_string(x.size()));
  }
  Complex value{1.0, 0.0};
  for (std::size_t i = 0; i < k.size(); ++i) {
    value *= eval_1d(kind, k[i], x[i]);
  }
  return value;
}

}  // namespace basis
}  // namespace anova
