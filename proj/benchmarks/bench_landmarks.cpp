#include <benchmark/benchmark.h>

#include "gplmk/kernel.hpp"
#include "gplmk/landmarks.hpp"
#include "gplmk/shapes.hpp"

namespace {

using namespace gplmk;

void BM_GpLandmarks(benchmark::State& state) {
  const TriMesh m = shapes::crown(24, 0.3, shapes::molar_cusps());
  const KernelMatrix k = landmarking_kernel(m, {});
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gp_landmarks(k, count).indices.data());
}
BENCHMARK(BM_GpLandmarks)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_Gfps(benchmark::State& state) {
  const TriMesh m = shapes::crown(24, 0.3, shapes::molar_cusps());
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gfps_landmarks(m, count, 0).indices.data());
}
BENCHMARK(BM_Gfps)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
