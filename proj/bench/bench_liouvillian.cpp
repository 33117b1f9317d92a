#include <benchmark/benchmark.h>

#include "arraylight/liouvillian.hpp"
#include "arraylight/model.hpp"

using namespace arraylight;

namespace {

LindbladModel trapped_pair(int n_max) {
  ModelParams p = waveguide_params({0.0, 1.8 * kPi}, 1e-4, 0.36);
  p.axes.push_back({Vec3::UnitX(), 1e-4, 0.056, n_max});
  return assemble_model(p);
}

DenseMatrix test_state(std::size_t dim) {
  DenseMatrix rho = DenseMatrix::Random(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  rho = rho * rho.adjoint();
  return rho / rho.trace();
}

void BM_ApplyParallel(benchmark::State& state) {
  const auto m = trapped_pair(static_cast<int>(state.range(0)));
  const DenseMatrix rho = test_state(m.dim());
  for (auto _ : state) benchmark::DoNotOptimize(liouvillian_apply(m, rho));
  state.counters["dim"] = static_cast<double>(m.dim());
}

void BM_ApplySerialReference(benchmark::State& state) {
  const auto m = trapped_pair(static_cast<int>(state.range(0)));
  const DenseMatrix rho = test_state(m.dim());
  for (auto _ : state) benchmark::DoNotOptimize(reference::liouvillian_apply(m, rho));
  state.counters["dim"] = static_cast<double>(m.dim());
}

}  // namespace

BENCHMARK(BM_ApplyParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ApplySerialReference)->Arg(1)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
