// Serial vs OpenMP timings of the hot kernels. Run with --benchmark_filter=...
#include <benchmark/benchmark.h>

#include <random>

#include "wedge/pipeline.hpp"

using namespace wedge;

namespace {

std::vector<Complex> point(int r, mpfr_prec_t prec) {
  std::vector<Complex> Q;
  for (int j = 0; j < r; ++j) Q.emplace_back(0.8 + 0.05 * j, 0.3 - 0.04 * j, prec);
  return Q;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_PowerSumE8(benchmark::State& st) {
  auto rs = RootSystem::parse("E8");
  auto adj = adjoint_weight_system(rs);
  MultiIndexSet mis(8, 2);
  TorusPoint pt{point(8, 560), 0.0};
  for (auto _ : st) benchmark::DoNotOptimize(power_sum_jet(adj, 3, pt, mis, 560, rs.cartan(), exec_of(st)));
}
BENCHMARK(BM_PowerSumE8)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ExteriorJetsD4(benchmark::State& st) {
  auto rs = RootSystem::parse("D4");
  CharacterEngine eng(rs);
  MultiIndexSet mis(4, 3);
  TorusPoint pt{point(4, 560), 0.0};
  for (auto _ : st) benchmark::DoNotOptimize(eng.exterior_jets(pt, mis, 14, 560, exec_of(st)));
}
BENCHMARK(BM_ExteriorJetsD4)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Dixon(benchmark::State& st) {
  const size_t n = static_cast<size_t>(st.range(1));
  std::mt19937_64 g(1);
  ZMatrix A(n, n), B(n, 4);
  for (auto& z : A.a) z = static_cast<long>(g() >> 2) - (1L << 61);
  for (auto& z : B.a) z = static_cast<long>(g() >> 34);
  DixonOptions opt;
  opt.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(dixon_solve(A, B, opt));
}
BENCHMARK(BM_Dixon)->Args({0, 200})->Args({1, 200})->Unit(benchmark::kMillisecond);

void BM_RunD4(benchmark::State& st) {
  RunConfig cfg;
  cfg.group = "D4";
  cfg.d_max = 0;  // zero fibre is singular
  cfg.workers = st.range(0) ? 4 : 1;
  for (auto _ : st) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(BM_RunD4)->Arg(0)->Arg(1)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
