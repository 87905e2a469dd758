#include "anova/design_operator.hpp"

#include <string>
#include <type_traits>

#include "anova/error.hpp"

namespace anova {

namespace {

inline double conj_if(double v) noexcept { return v; }
inline Complex conj_if(const Complex& v) noexcept { return std::conj(v); }

template <class Scalar>
Scalar basis_value(BasisKind kind, int k, double x) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return basis::eval_1d_real(kind, k, x);
  } else {
    return basis::eval_1d(kind, k, x);
  }
}

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::LengthMismatch,
                std::string(what) + " has length " + std::to_string(got) +
                    ", expected " + std::to_string(want));
  }
}

}  // namespace

template <class Scalar>
DesignOperator<Scalar>::DesignOperator(BasisKind kind, Matrix nodes,
                                       FrequencyIndexUnion index)
    : kind_(kind), nodes_(std::move(nodes)), index_(std::move(index)) {
  if (std::is_same_v<Scalar, double> && !is_real(kind_)) {
    throw Error(ErrorCode::InvalidArgument,
                "the exponential system needs a complex operator");
  }
  if (nodes_.rows() > 0 && nodes_.cols() != index_.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "nodes have " + std::to_string(nodes_.cols()) +
                    " columns but the index set has dimension " +
                    std::to_string(index_.dimension()));
  }
  for (double x : nodes_.data()) basis::check_domain(kind_, x);

  const int kmax = index_.max_abs_frequency();
  kmin_ = is_periodic(kind_) ? -kmax : 0;
  width_ = static_cast<std::size_t>(kmax - kmin_ + 1);

  const std::size_t d = nodes_.cols();
  const std::size_t m_count = nodes_.rows();
  table_.resize(d * m_count * width_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(m_count); ++m) {
    for (std::size_t j = 0; j < d; ++j) {
      const double x = nodes_(static_cast<std::size_t>(m), j);
      Scalar* slot =
          &table_[(j * m_count + static_cast<std::size_t>(m)) * width_];
      for (std::size_t w = 0; w < width_; ++w) {
        slot[w] = basis_value<Scalar>(kind_, kmin_ + static_cast<int>(w), x);
      }
    }
  }
}

template <class Scalar>
Scalar DesignOperator<Scalar>::entry(std::size_t row,
                                     std::size_t col) const noexcept {
  const Term& u = index_.groups()[index_.group_of(col)].term;
  const auto k = index_.local_frequency(col);
  Scalar phi{1.0};
  for (std::size_t s = 0; s < u.size(); ++s) phi *= table(u[s], row, k[s]);
  return phi;
}

template <class Scalar>
std::vector<Scalar> DesignOperator<Scalar>::apply(
    std::span<const Scalar> coefficients) const {
  check_length(coefficients.size(), cols(), "coefficient vector");
  std::vector<Scalar> out(rows());
  const auto m_count = static_cast<std::ptrdiff_t>(rows());
  const std::size_t n = cols();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < m_count; ++m) {
    Scalar acc{0.0};
    for (std::size_t col = 0; col < n; ++col) {
      acc += coefficients[col] * entry(static_cast<std::size_t>(m), col);
    }
    out[static_cast<std::size_t>(m)] = acc;
  }
  return out;
}

template <class Scalar>
std::vector<Scalar> DesignOperator<Scalar>::apply_adjoint(
    std::span<const Scalar> values) const {
  check_length(values.size(), rows(), "value vector");
  std::vector<Scalar> out(cols());
  const auto n = static_cast<std::ptrdiff_t>(cols());
  const std::size_t m_count = rows();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t col = 0; col < n; ++col) {
    Scalar acc{0.0};
    for (std::size_t m = 0; m < m_count; ++m) {
      acc += conj_if(entry(m, static_cast<std::size_t>(col))) * values[m];
    }
    out[static_cast<std::size_t>(col)] = acc;
  }
  return out;
}

template <class Scalar>
std::vector<Scalar> DesignOperator<Scalar>::apply_reference(
    std::span<const Scalar> coefficients) const {
  check_length(coefficients.size(), cols(), "coefficient vector");
  std::vector<Scalar> out(rows(), Scalar{0.0});
  for (std::size_t col = 0; col < cols(); ++col) {
    const std::vector<int> k = index_.frequency(col);
    for (std::size_t m = 0; m < rows(); ++m) {
      const Complex phi = basis::eval_tensor(kind_, k, nodes_.row(m));
      if constexpr (std::is_same_v<Scalar, double>) {
        out[m] += coefficients[col] * phi.real();
      } else {
        out[m] += coefficients[col] * phi;
      }
    }
  }
  return out;
}

template <class Scalar>
std::vector<Scalar> DesignOperator<Scalar>::apply_adjoint_reference(
    std::span<const Scalar> values) const {
  check_length(values.size(), rows(), "value vector");
  std::vector<Scalar> out(cols(), Scalar{0.0});
  for (std::size_t col = 0; col < cols(); ++col) {
    const std::vector<int> k = index_.frequency(col);
    for (std::size_t m = 0; m < rows(); ++m) {
      const Complex phi = basis::eval_tensor(kind_, k, nodes_.row(m));
      if constexpr (std::is_same_v<Scalar, double>) {
        out[col] += phi.real() * values[m];
      } else {
        out[col] += std::conj(phi) * values[m];
      }
    }
  }
  return out;
}

template class DesignOperator<double>;
template class DesignOperator<Complex>;

}  // namespace anova
