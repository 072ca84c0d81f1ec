#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gplmk/errors.hpp"
#include "gplmk/evaluation/coverage.hpp"
#include "gplmk/landmarks.hpp"
#include "gplmk/shapes.hpp"

namespace gplmk {
namespace {

TEST(Median, OddEven) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

TEST(CoverageCurve, OracleAndMonotone) {
  const TriMesh m = shapes::icosphere(2);
  const std::vector<VertexId> observer = {1, 40, 77, 120, 150};
  const LandmarkSet autos = random_landmarks(m, 20, 5);
  const CoverageCurve c = coverage_curve(m, observer, autos.indices, 20);
  ASSERT_EQ(c.values.size(), 20);
  for (Eigen::Index k = 1; k < 20; ++k) EXPECT_LE(c.values[k], c.values[k - 1]);
  // Oracle at m = 7 from per-landmark distance fields.
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m.num_vertices()), 1e300);
  for (int j = 0; j < 7; ++j) {
    const VertexId src[] = {autos.indices[static_cast<std::size_t>(j)]};
    nearest = nearest.cwiseMin(geodesic_distances(m, src));
  }
  std::vector<double> obs;
  for (VertexId o : observer) obs.push_back(nearest[o]);
  EXPECT_DOUBLE_EQ(c.values[6], median(obs));
}

TEST(CoverageCurve, ReachesZeroWhenObserversSelected) {
  const TriMesh m = shapes::hemisphere(6);
  const LandmarkSet gp = gp_landmarks(landmarking_kernel(m, {}), 12);
  const std::vector<VertexId> observer(gp.indices.begin(), gp.indices.begin() + 5);
  const CoverageCurve c = coverage_curve(m, observer, gp.indices, 12);
  EXPECT_EQ(c.values[4], 0.0);
  EXPECT_GT(c.values[1], 0.0);
}

TEST(CoverageCurve, RejectsTooFewLandmarks) {
  const TriMesh m = shapes::icosahedron();
  const std::vector<VertexId> observer = {0};
  const std::vector<VertexId> autos = {1, 2};
  EXPECT_THROW(coverage_curve(m, observer, autos, 3), RangeError);
}

}  // namespace
}  // namespace gplmk
