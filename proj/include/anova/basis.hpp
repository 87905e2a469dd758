#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>

namespace anova {

using Complex = std::complex<double>;

// One-dimensional orthonormal system used in every coordinate.
//   Exponential: e^{2 pi i k x} on the torus [-0.5, 0.5), complex valued.
//   Cosine:      sqrt(2) cos(pi k x) on [0, 1] (1 for k = 0).
//   Chebyshev:   sqrt(2) cos(k arccos(2x - 1)) on [0, 1] (1 for k = 0),
//                orthonormal w.r.t. the Chebyshev measure; uniformly
//                scattered nodes are a poor match for this system.
enum class BasisKind { Exponential, Cosine, Chebyshev };

bool is_periodic(BasisKind kind) noexcept;
bool is_real(BasisKind kind) noexcept;

// CLI / file tokens: "per", "cos", "cheb".
BasisKind parse_basis(std::string_view token);
std::string_view basis_token(BasisKind kind) noexcept;

namespace basis {

// Maps a coordinate onto [-0.5, 0.5) by periodicity.
double wrap_torus(double x) noexcept;

// Throws DomainViolation for nonperiodic kinds when x is outside [0, 1].
void check_domain(BasisKind kind, double x);

Complex eval_1d(BasisKind kind, int k, double x);

// Real-valued evaluation for Cosine/Chebyshev; rejects Exponential.
double eval_1d_real(BasisKind kind, int k, double x);

// phi_k(x) = prod_i eta_{k_i}(x_i).
Complex eval_tensor(BasisKind kind, std::span<const int> k,
                    std::span<const double> x);

}  // namespace basis
}  // namespace anova
