#include <benchmark/benchmark.h>

#include "gplmk/evaluation/permutation_tests.hpp"
#include "gplmk/random.hpp"

namespace {

using namespace gplmk;

Eigen::MatrixXd random_distances(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd pts(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) pts(i, c) = rng.uniform();
  }
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
  }
  return d;
}

void BM_Mantel(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::MatrixXd a = random_distances(n, 1);
  const Eigen::MatrixXd b = random_distances(n, 2);
  PermutationOptions opt;
  opt.permutations = 999;
  opt.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mantel_test(a, b, opt).p_value);
}
BENCHMARK(BM_Mantel)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
