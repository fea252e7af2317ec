#include <complex>
#include <random>

#include <benchmark/benchmark.h>

#include "annulus/annulus_classes.hpp"
#include "annulus/shift_models.hpp"
#include "annulus/vn_engine.hpp"

namespace annulus {
namespace {

Matrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(d(g), d(g));
  return 0.2 * m + 0.8 * Matrix::Identity(n, n);
}

void BM_OpNorm(benchmark::State& state) {
  const Operator t(random_matrix(state.range(0), 1));
  for (auto _ : state) benchmark::DoNotOptimize(op_norm(t));
}
BENCHMARK(BM_OpNorm)->Arg(2)->Arg(6)->Arg(16)->Arg(64);

void BM_SupNorm(benchmark::State& state) {
  std::vector<cplx> c;
  for (int k = -8; k <= 8; ++k) c.emplace_back(1.0 / (1 + k * k), 0.1 * k);
  const LaurentPolynomial f(-8, c);
  const AnnulusDomain dom = AnnulusDomain::standard(AnnulusParams(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(sup_norm_annulus(f, dom, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_SupNorm)->Arg(256)->Arg(512)->Arg(2048);

void BM_KSearch(benchmark::State& state) {
  const AnnulusParams p(0.5);
  const Matrix m = misra_pair(p, 0.8).t.matrix();
  Matrix big = Matrix::Identity(state.range(0), state.range(0)) * cplx(0.75);
  big.topLeftCorner(2, 2) = m;
  const Operator t(big);
  for (auto _ : state) benchmark::DoNotOptimize(max_k_search(t, p, VnBudget{}).k_lower);
}
BENCHMARK(BM_KSearch)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ShiftApply(benchmark::State& state) {
  const ShiftModel m = ShiftModel::mzt(AnnulusParams(0.5));
  const WeightedSeq f = onb_vector(m, 0);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(norm_sq(m, shift_apply(m, n, f)));
}
BENCHMARK(BM_ShiftApply)->Arg(1)->Arg(16)->Arg(64);

}  // namespace
}  // namespace annulus

BENCHMARK_MAIN();
