#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gplmk/errors.hpp"
#include "gplmk/geometry.hpp"
#include "gplmk/shapes.hpp"
#include "gplmk/spectral.hpp"

namespace gplmk {
namespace {

Eigen::MatrixXd random_symmetric(Rng& rng, Eigen::Index n) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = 2.0 * rng.uniform() - 1.0;
  return 0.5 * (a + a.transpose());
}

TEST(Spectral, LanczosMatchesDense) {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd s = random_symmetric(rng, 80);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(s);
    SpectralOptions opt;
    opt.dense_limit = 0;
    const EigenPairs p = largest_eigenpairs(s, 4, opt);
    for (Eigen::Index k = 0; k < 4; ++k) {
      EXPECT_NEAR(p.values[k], dense.eigenvalues()[79 - k], 1e-8);
      EXPECT_NEAR((s * p.vectors.col(k) - p.values[k] * p.vectors.col(k)).norm(), 0.0, 1e-6);
    }
  }
}

TEST(Spectral, SignsAreCanonical) {
  Rng rng(8);
  const Eigen::MatrixXd s = random_symmetric(rng, 30);
  const EigenPairs p = largest_eigenpairs(s, 5);
  for (Eigen::Index k = 0; k < 5; ++k) {
    Eigen::Index arg;
    p.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(p.vectors(arg, k), 0.0);
  }
}

TEST(Spectral, GeneralizedDenseAndShiftInvertAgree) {
  const TriMesh m = shapes::icosphere(2);
  const auto l = cotan_laplacian(m);
  const Eigen::VectorXd mass = voronoi_areas(m).values;
  const EigenPairs dense = smallest_generalized(l, mass, 6);
  SpectralOptions opt;
  opt.dense_limit = 0;
  const EigenPairs iter = smallest_generalized(l, mass, 6, opt);
  EXPECT_NEAR(dense.values[0], 0.0, 1e-9);
  for (Eigen::Index k = 0; k < 6; ++k) {
    EXPECT_NEAR(iter.values[k], dense.values[k], 1e-7 * std::max(1.0, dense.values[k]));
    // M-orthonormal.
    EXPECT_NEAR(dense.vectors.col(k).dot(mass.asDiagonal() * dense.vectors.col(k)), 1.0, 1e-10);
  }
  // l = 1 spherical harmonics have eigenvalue 2 on the unit sphere.
  for (Eigen::Index k = 1; k <= 3; ++k) EXPECT_NEAR(dense.values[k], 2.0, 0.05);
}

TEST(Spectral, RangeErrors) {
  const Eigen::MatrixXd s = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(largest_eigenpairs(s, 4), RangeError);
  EXPECT_THROW(largest_eigenpairs(s, 0), RangeError);
}

}  // namespace
}  // namespace gplmk
