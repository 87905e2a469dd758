#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "anova/basis.hpp"
#include "anova/matrix.hpp"
#include "anova/terms.hpp"

namespace anova {

/// Matrix-free action of F(X, I(U)) = (phi_k(x_m))_{m, k} and its adjoint.
///
/// Columns follow the enumeration of the FrequencyIndexUnion. Scalar is
/// double for the Cosine/Chebyshev systems and std::complex<double> for the
/// Exponential system.
///
/// apply() and apply_adjoint() are the OpenMP kernels. Each output entry
/// is a sequential sum in a fixed order, so results are bitwise identical
/// for any thread count. The *_reference() variants are serial direct
/// evaluations through basis::eval_tensor and exist for testing and
/// benchmarking only.
template <class Scalar>
class DesignOperator {
 public:
  using scalar_type = Scalar;

  DesignOperator(BasisKind kind, Matrix nodes, FrequencyIndexUnion index);

  BasisKind kind() const noexcept { return kind_; }
  std::size_t rows() const noexcept { return nodes_.rows(); }
  std::size_t cols() const noexcept { return index_.size(); }
  const Matrix& nodes() const noexcept { return nodes_; }
  const FrequencyIndexUnion& index() const noexcept { return index_; }

  // M / |I(U)|; full column rank is plausible above 1.
  double oversampling() const noexcept {
    return static_cast<double>(rows()) / static_cast<double>(cols());
  }

  std::vector<Scalar> apply(std::span<const Scalar> coefficients) const;
  std::vector<Scalar> apply_adjoint(std::span<const Scalar> values) const;

  std::vector<Scalar> apply_reference(
      std::span<const Scalar> coefficients) const;
  std::vector<Scalar> apply_adjoint_reference(
      std::span<const Scalar> values) const;

 private:
  Scalar table(std::size_t var, std::size_t row, int k) const noexcept {
    return table_[(var * rows() + row) * width_ +
                  static_cast<std::size_t>(k - kmin_)];
  }
  Scalar entry(std::size_t row, std::size_t col) const noexcept;

  BasisKind kind_;
  Matrix nodes_;
  FrequencyIndexUnion index_;
  int kmin_ = 0;
  std::size_t width_ = 1;
  // eta_k(x_{m, j}) for every variable j, node m and k in [kmin, kmin+width)
  std::vector<Scalar> table_;
};

extern template class DesignOperator<double>;
extern template class DesignOperator<std::complex<double>>;

}  // namespace anova
