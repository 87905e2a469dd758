#pragma once

// Test-side reference implementations. Nothing here calls into the library's
// evaluation paths: basis values come from direct formulas, index sets from
// an independent recursion, and least-squares solutions from Eigen.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anova/basis.hpp"
#include "anova/matrix.hpp"
#include "anova/terms.hpp"

namespace oracle {

using anova::BasisKind;
using Complex = std::complex<double>;

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points mapped to [a, b].
inline Quadrature gauss_legendre(std::size_t n, double a = 0.0, double b = 1.0) {
  Quadrature q{std::vector<double>(n), std::vector<double>(n)};
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = t;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * t * p1 -
                           (static_cast<double>(k) - 1.0) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    q.nodes[i] = mid - half * t;
    q.nodes[n - 1 - i] = mid + half * t;
    q.weights[i] = q.weights[n - 1 - i] = half * w;
  }
  return q;
}

// Gauss-Chebyshev rule for the probability measure dx / (pi sqrt(x (1 - x)))
// on [0, 1]; exact for polynomials of degree < 2n.
inline Quadrature gauss_chebyshev_unit(std::size_t n) {
  Quadrature q;
  for (std::size_t j = 1; j <= n; ++j) {
    const double theta = std::numbers::pi * (2.0 * static_cast<double>(j) - 1.0) /
                         (2.0 * static_cast<double>(n));
    q.nodes.push_back(0.5 * (1.0 + std::cos(theta)));
    q.weights.push_back(1.0 / static_cast<double>(n));
  }
  return q;
}

// eta_k(x) from the textbook definitions; Chebyshev through the three-term
// recurrence rather than arccos.
inline Complex eta(BasisKind kind, int k, double x) {
  const double pi = std::numbers::pi;
  switch (kind) {
    case BasisKind::Exponential:
      return std::polar(1.0, 2.0 * pi * static_cast<double>(k) * x);
    case BasisKind::Cosine:
      return k == 0 ? 1.0 : std::sqrt(2.0) * std::cos(pi * k * x);
    case BasisKind::Chebyshev: {
      if (k == 0) return 1.0;
      const double t = 2.0 * x - 1.0;
      double a = 1.0;
      double b = t;
      for (int j = 2; j <= k; ++j) {
        const double c = 2.0 * t * b - a;
        a = b;
        b = c;
      }
      return std::sqrt(2.0) * b;
    }
  }
  return 0.0;
}

inline Complex phi(BasisKind kind, const std::vector<int>& k,
                   std::span<const double> x) {
  Complex v = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) v *= eta(kind, k[i], x[i]);
  return v;
}

inline std::vector<int> grid_1d(BasisKind kind, int n) {
  std::vector<int> g;
  if (kind == BasisKind::Exponential) {
    for (int k = -n / 2; k <= n / 2 - 1; ++k) {
      if (k != 0) g.push_back(k);
    }
  } else {
    for (int k = 1; k <= n - 1; ++k) g.push_back(k);
  }
  return g;
}

// Dense frequencies of I(U) by recursion over the positions of each term,
// last position varying fastest.
inline std::vector<std::vector<int>> enumerate_index(
    const anova::TermSet& terms, const anova::BandwidthProfile& bw,
    BasisKind kind) {
  std::vector<std::vector<int>> out;
  const std::size_t d = terms.dimension();
  for (const anova::Term& u : terms) {
    if (u.empty()) {
      out.emplace_back(d, 0);
      continue;
    }
    const std::vector<int> g = grid_1d(kind, bw.at(u.size()));
    std::vector<int> k(d, 0);
    auto rec = [&](auto&& self, std::size_t pos) -> void {
      if (pos == u.size()) {
        out.push_back(k);
        return;
      }
      for (int v : g) {
        k[u[pos]] = v;
        self(self, pos + 1);
      }
      k[u[pos]] = 0;
    };
    rec(rec, 0);
  }
  return out;
}

inline Eigen::MatrixXcd dense_matrix(BasisKind kind, const anova::Matrix& x,
                                     const std::vector<std::vector<int>>& freq) {
  Eigen::MatrixXcd f(static_cast<Eigen::Index>(x.rows()),
                     static_cast<Eigen::Index>(freq.size()));
  for (std::size_t m = 0; m < x.rows(); ++m) {
    for (std::size_t j = 0; j < freq.size(); ++j) {
      f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) =
          phi(kind, freq[j], x.row(m));
    }
  }
  return f;
}

// argmin ||y - F g||^2 + lambda ||g||^2 via (F^* F + lambda I) g = F^* y.
inline Eigen::VectorXcd normal_equations(const Eigen::MatrixXcd& f,
                                         const Eigen::VectorXcd& y,
                                         double lambda) {
  Eigen::MatrixXcd a = f.adjoint() * f;
  a.diagonal().array() += lambda;
  return a.ldlt().solve(f.adjoint() * y);
}

inline anova::Matrix random_nodes(std::mt19937_64& rng, std::size_t m,
                                  std::size_t d, BasisKind kind) {
  const double lo = kind == BasisKind::Exponential ? -0.5 : 0.0;
  std::uniform_real_distribution<double> u(lo, lo + 1.0);
  anova::Matrix x(m, d);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < d; ++c) x(r, c) = u(rng);
  }
  return x;
}

// Random term set over d variables with orders up to max_order.
inline anova::TermSet random_terms(std::mt19937_64& rng, std::size_t d,
                                   std::size_t max_order, double keep = 0.5) {
  std::bernoulli_distribution coin(keep);
  std::vector<anova::Term> terms;
  const std::size_t total = std::size_t{1} << d;
  for (std::size_t mask = 1; mask < total; ++mask) {
    anova::Term u;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask & (std::size_t{1} << i)) u.push_back(i);
    }
    if (u.size() <= max_order && coin(rng)) terms.push_back(std::move(u));
  }
  return anova::TermSet(d, std::move(terms));
}

inline double rel_error(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  return nb == 0.0 ? a.norm() : (a - b).norm() / nb;
}

template <class Scalar>
Eigen::VectorXcd to_eigen(const std::vector<Scalar>& v) {
  Eigen::VectorXcd e(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    e(static_cast<Eigen::Index>(i)) = Complex(v[i]);
  }
  return e;
}

}  // namespace oracle
