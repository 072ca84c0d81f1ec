#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gplmk/errors.hpp"
#include "gplmk/landmarks.hpp"
#include "gplmk/log.hpp"
#include "gplmk/shapes.hpp"

namespace gplmk {
namespace {

class QuietLog : public ::testing::Test {
 protected:
  void SetUp() override { set_log_sink([](LogLevel, std::string_view) {}); }
  void TearDown() override { set_log_sink({}); }
};

TEST(GreedySelect, MatchesInverseOracle) {
  Rng rng(123);
  for (int trial = 0; trial < 9; ++trial) {
    const std::size_t n = 30 + 10 * static_cast<std::size_t>(trial % 3);
    const KernelMatrix k = test::random_psd(rng, n, trial);
    const std::size_t count = 12;
    const GreedySelection sel = greedy_select(k, count);
    EXPECT_EQ(sel.landmarks.indices, test::oracle_greedy(k.entries, count)) << "trial " << trial;
    Eigen::VectorXd oracle = test::oracle_variance(k.entries, sel.landmarks.indices);
    oracle = oracle.cwiseMax(0.0);
    for (VertexId v : sel.landmarks.indices) oracle[v] = 0.0;
    const double scale = k.entries.diagonal().maxCoeff();
    EXPECT_LT((sel.residual_variance - oracle).cwiseAbs().maxCoeff(), 1e-8 * scale);
  }
}

TEST(GreedySelect, FirstPickIsLargestDiagonalAndScoresDecrease) {
  Rng rng(9);
  const KernelMatrix k = test::random_psd(rng, 50, 1);
  const LandmarkSet s = gp_landmarks(k, 15);
  Eigen::Index arg;
  k.entries.diagonal().maxCoeff(&arg);
  EXPECT_EQ(s.indices[0], arg);
  EXPECT_DOUBLE_EQ(s.scores[0], k.entries(arg, arg));
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s.scores[i], s.scores[i - 1] * (1 + 1e-12));
  EXPECT_EQ(std::set<VertexId>(s.indices.begin(), s.indices.end()).size(), s.size());
}

TEST(GreedySelect, TiesGoToLowestIndex) {
  // All diagonal entries equal on the plain kernel of a symmetric solid.
  const LandmarkSet s = gp_landmarks(plain_kernel(shapes::icosahedron(), 0.5), 2);
  EXPECT_EQ(s.indices[0], 0);
}

TEST(GreedySelect, PrefixProperty) {
  Rng rng(31);
  const KernelMatrix k = test::random_psd(rng, 40, 0);
  const LandmarkSet big = gp_landmarks(k, 20);
  for (std::size_t m : {1u, 5u, 13u}) {
    const LandmarkSet small = gp_landmarks(k, m);
    EXPECT_TRUE(std::equal(small.indices.begin(), small.indices.end(), big.indices.begin()));
    EXPECT_EQ(big.prefix(m).indices, small.indices);
  }
}

TEST_F(QuietLog, RankExhaustion) {
  Rng rng(6);
  const KernelMatrix k = test::random_gram(rng, 20, 3);
  EXPECT_THROW(gp_landmarks(k, 5), RankExhaustionError);
  GreedyOptions opt;
  opt.allow_truncation = true;
  const LandmarkSet s = gp_landmarks(k, 5, opt);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_TRUE(s.truncated);
}

TEST(GreedySelect, CountOutOfRange) {
  const KernelMatrix k = plain_kernel(shapes::icosahedron(), 0.5);
  EXPECT_THROW(gp_landmarks(k, 13), RangeError);
  EXPECT_THROW(gp_landmarks(k, 0), RangeError);
}

TEST(UncertaintyField, ZeroAtLandmarksAndMonotone) {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    const KernelMatrix k = test::random_psd(rng, 60, trial);
    const LandmarkSet s = gp_landmarks(k, 15);
    Eigen::VectorXd prev = k.entries.diagonal();
    const double scale = prev.maxCoeff();
    for (std::size_t m = 1; m <= s.size(); ++m) {
      const std::span<const VertexId> prefix(s.indices.data(), m);
      const VertexField sigma = uncertainty_field(k, prefix);
      EXPECT_TRUE(((sigma.values - prev).array() <= 1e-9 * scale).all());
      for (VertexId v : prefix) EXPECT_LE(sigma[v], 1e-9 * scale);
      prev = sigma.values;
    }
  }
}

TEST(UncertaintyField, RejectsDuplicatesAndSingular) {
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}, {0, 0, 0}, {1, 0, 0}};
  const KernelMatrix k = plain_kernel(pts, 0.5);
  const VertexId dup[] = {0, 0};
  EXPECT_THROW(uncertainty_field(k, dup), RangeError);
  const VertexId same_point[] = {0, 1};
  EXPECT_THROW(uncertainty_field(k, same_point), SingularSubmatrixError);
}

TEST(Gfps, MaxMinProperty) {
  const TriMesh m = shapes::hemisphere(6);
  const LandmarkSet s = gfps_landmarks(m, 10, 7);
  EXPECT_EQ(s.indices[0], 7);
  for (std::size_t i = 1; i < s.size(); ++i) {
    // Each pick is the farthest vertex from the picks before it.
    const std::span<const VertexId> before(s.indices.data(), i);
    const Eigen::VectorXd d = geodesic_distances(m, before);
    EXPECT_NEAR(d[s.indices[i]], d.maxCoeff(), 1e-12);
    EXPECT_NEAR(s.scores[i], d.maxCoeff(), 1e-12);
    if (i > 1) EXPECT_LE(s.scores[i], s.scores[i - 1] + 1e-12);
  }
  EXPECT_THROW(gfps_landmarks(m, 5, -1), RangeError);
}

TEST(RandomLandmarks, DistinctDeterministicSeedDependent) {
  const LandmarkSet a = random_landmarks(100, 30, 42);
  const LandmarkSet b = random_landmarks(100, 30, 42);
  const LandmarkSet c = random_landmarks(100, 30, 43);
  EXPECT_EQ(a.indices, b.indices);
  EXPECT_NE(a.indices, c.indices);
  EXPECT_EQ(std::set<VertexId>(a.indices.begin(), a.indices.end()).size(), 30u);
  EXPECT_THROW(random_landmarks(10, 11, 0), RangeError);
}

TEST(RandomLandmarks, RoughlyUniform) {
  std::vector<int> hits(10, 0);
  for (std::uint64_t s = 0; s < 2000; ++s) hits[static_cast<std::size_t>(random_landmarks(10, 1, s).indices[0])]++;
  for (int h : hits) EXPECT_NEAR(h, 200, 60);
}

TEST(DeterminantRatio, BoundsAndTrivialCases) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const KernelMatrix k = test::random_psd(rng, 12, trial);
    const double r = greedy_determinant_ratio(k, 3);
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, 1.0 + 1e-12);
    // n = 1 greedy is the largest diagonal entry, hence optimal.
    EXPECT_NEAR(greedy_determinant_ratio(k, 1), 1.0, 1e-15);
  }
  EXPECT_THROW(greedy_determinant_ratio(test::random_gram(rng, 200, 200), 4), ComplexityGuardError);
}

TEST(LandmarkMethod, NameRoundTrip) {
  for (auto m : {LandmarkMethod::GP, LandmarkMethod::GP_nW, LandmarkMethod::GP_Euc, LandmarkMethod::GFPS,
                 LandmarkMethod::Random, LandmarkMethod::Observer}) {
    EXPECT_EQ(landmark_method_from_string(to_string(m)), m);
  }
  EXPECT_EQ(landmark_method_from_string("GP_NW"), LandmarkMethod::GP_nW);
  EXPECT_THROW(landmark_method_from_string("kmeans"), ConfigError);
}

}  // namespace
}  // namespace gplmk
