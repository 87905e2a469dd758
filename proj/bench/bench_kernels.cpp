// OpenMP kernels against the serial reference.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "anova/design_operator.hpp"

using namespace anova;

namespace {

// Friedman-1 sized first stage: d = 10, U_2, N = (4, 2), 76 columns.
DesignOperator<double> make_operator(std::size_t m) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(m, 10);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < 10; ++c) x(r, c) = u(rng);
  }
  const TermSet terms = superposition_terms(10, 2);
  const BandwidthProfile bw({{1, 6}, {2, 4}});
  return DesignOperator<double>(BasisKind::Cosine, std::move(x),
                                build_index_union(terms, bw, BasisKind::Cosine));
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

void BM_Apply(benchmark::State& state) {
  const auto op = make_operator(static_cast<std::size_t>(state.range(0)));
  const auto c = ones(op.cols());
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(c));
}

void BM_ApplyReference(benchmark::State& state) {
  const auto op = make_operator(static_cast<std::size_t>(state.range(0)));
  const auto c = ones(op.cols());
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_reference(c));
}

void BM_Adjoint(benchmark::State& state) {
  const auto op = make_operator(static_cast<std::size_t>(state.range(0)));
  const auto y = ones(op.rows());
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_adjoint(y));
}

void BM_AdjointReference(benchmark::State& state) {
  const auto op = make_operator(static_cast<std::size_t>(state.range(0)));
  const auto y = ones(op.rows());
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_adjoint_reference(y));
}

}  // namespace

BENCHMARK(BM_Apply)->Arg(1000)->Arg(20000);
BENCHMARK(BM_ApplyReference)->Arg(1000)->Arg(20000);
BENCHMARK(BM_Adjoint)->Arg(1000)->Arg(20000);
BENCHMARK(BM_AdjointReference)->Arg(1000)->Arg(20000);

BENCHMARK_MAIN();
