#include <benchmark/benchmark.h>

#include "gplmk/geometry.hpp"
#include "gplmk/kernel.hpp"
#include "gplmk/shapes.hpp"

namespace {

using namespace gplmk;

void BM_PlainKernel(benchmark::State& state) {
  const TriMesh m = shapes::icosphere(static_cast<int>(state.range(0)));
  const double t = default_bandwidth(m);
  for (auto _ : state) benchmark::DoNotOptimize(plain_kernel(m, t).entries.data());
  state.counters["vertices"] = static_cast<double>(m.num_vertices());
}
BENCHMARK(BM_PlainKernel)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_ReweightedKernel(benchmark::State& state) {
  const TriMesh m = shapes::crown(static_cast<int>(state.range(0)), 0.3, shapes::molar_cusps());
  for (auto _ : state) benchmark::DoNotOptimize(landmarking_kernel(m, {}).entries.data());
  state.counters["vertices"] = static_cast<double>(m.num_vertices());
}
BENCHMARK(BM_ReweightedKernel)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
