#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gplmk/errors.hpp"
#include "gplmk/geometry.hpp"
#include "gplmk/registration/wks.hpp"
#include "gplmk/shapes.hpp"

namespace gplmk {
namespace {

TEST(Wks, ShapeAndPositivity) {
  const TriMesh m = test::crown_fixture(8);
  WksOptions opt;
  opt.eigenpairs = 40;
  opt.energies = 25;
  const WksDescriptor d = wks(m, opt);
  EXPECT_EQ(d.values.rows(), static_cast<Eigen::Index>(m.num_vertices()));
  EXPECT_EQ(d.values.cols(), 25);
  EXPECT_TRUE((d.values.array() > 0.0).all());
  EXPECT_NEAR(d.eigenvalues[0], 0.0, 1e-8);
  const double step = d.log_energies[1] - d.log_energies[0];
  EXPECT_NEAR(d.sigma, 7.0 * step, 1e-12);
  EXPECT_NEAR(d.log_energies[0], std::log(d.eigenvalues[1]), 1e-12);
  EXPECT_NEAR(d.log_energies[24], std::log(d.eigenvalues[d.eigenvalues.size() - 1]) / 1.02, 1e-12);
}

TEST(Wks, OracleAtOneVertex) {
  const TriMesh m = shapes::hemisphere(4);
  WksOptions opt;
  opt.eigenpairs = 20;
  opt.energies = 10;
  const WksDescriptor d = wks(m, opt);
  const EigenPairs ep = smallest_generalized(cotan_laplacian(m), voronoi_areas(m).values, 20);
  const Eigen::Index v = 17;
  for (Eigen::Index e = 0; e < 10; ++e) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index k = 1; k < 20; ++k) {
      const double g = std::exp(-std::pow(d.log_energies[e] - std::log(ep.values[k]), 2) / (2 * d.sigma * d.sigma));
      num += ep.vectors(v, k) * ep.vectors(v, k) * g;
      den += g;
    }
    EXPECT_NEAR(d.values(v, e), num / den, 1e-8 * num / den);
  }
}

TEST(Wks, RigidInvariance) {
  const TriMesh m = test::crown_fixture(8);
  const Eigen::Affine3d t = Eigen::Translation3d(0.3, 1, -2) * Eigen::AngleAxisd(1.1, Eigen::Vector3d(1, 1, 0).normalized());
  WksOptions opt;
  opt.eigenpairs = 30;
  opt.energies = 20;
  const WksDescriptor a = wks(m, opt);
  const WksDescriptor b = wks(m.transformed(t), opt);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-6 * a.values.maxCoeff());
}

TEST(Wks, RowsSelectsLandmarks) {
  const TriMesh m = shapes::hemisphere(3);
  WksOptions opt;
  opt.eigenpairs = 10;
  opt.energies = 5;
  const WksDescriptor d = wks(m, opt);
  const VertexId ids[] = {4, 1};
  const Eigen::MatrixXd r = d.rows(ids);
  EXPECT_EQ(r.row(0), d.values.row(4));
  EXPECT_EQ(r.row(1), d.values.row(1));
}

}  // namespace
}  // namespace gplmk
