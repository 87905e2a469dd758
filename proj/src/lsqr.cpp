#include "anova/lsqr.hpp"

#include <string>

namespace anova {

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument,
                "regularization lambda must be finite and >= 0");
  }
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerance must lie in (0, 1)");
  }
  if (max_iterations && *max_iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  }
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::ZeroSolution:
      return "zero-solution";
    case StopReason::ResidualTolerance:
      return "residual-tolerance";
    case StopReason::LeastSquaresTolerance:
      return "least-squares-tolerance";
    case StopReason::MachinePrecision:
      return "machine-precision";
    case StopReason::IterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

}  // namespace anova
