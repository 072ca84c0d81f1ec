#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gplmk/errors.hpp"
#include "gplmk/kernel.hpp"
#include "gplmk/log.hpp"
#include "gplmk/shapes.hpp"

namespace gplmk {
namespace {

TEST(PlainKernel, EntriesMatchFormula) {
  Rng rng(1);
  const auto pts = test::random_cloud(rng, 25);
  const double t = 0.3;
  const KernelMatrix k = plain_kernel(pts, t);
  for (int i = 0; i < 25; ++i) {
    for (int j = 0; j < 25; ++j) {
      const double d2 = (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]).squaredNorm();
      EXPECT_NEAR(k.entries(i, j), std::exp(-2.0 * d2 / t), 1e-15);
    }
  }
  EXPECT_EQ(k.kind, KernelKind::Plain);
  EXPECT_EQ(k.bandwidth, t);
}

TEST(PlainKernel, RejectsBadBandwidth) {
  const std::vector<Eigen::Vector3d> pts = {Eigen::Vector3d::Zero()};
  EXPECT_THROW(plain_kernel(pts, 0.0), BandwidthError);
  EXPECT_THROW(plain_kernel(pts, -1.0), BandwidthError);
  EXPECT_THROW(plain_kernel(pts, std::nan("")), BandwidthError);
}

TEST(DefaultBandwidth, SquaredFractionOfDiagonal) {
  const TriMesh m = shapes::planar_grid(2, 2, 3.0, 4.0);
  EXPECT_NEAR(default_bandwidth(m), std::pow(0.08 * 5.0, 2), 1e-15);
  EXPECT_NEAR(default_bandwidth(m, 0.5), 6.25, 1e-12);
}

TEST(WeightFunction, UnitMassAndConvexCombination) {
  const TriMesh m = shapes::crown(8, 0.3, shapes::molar_cusps());
  const VertexField a = voronoi_areas(m);
  const VertexField k = gaussian_curvature(m, a);
  const VertexField h = mean_curvature(m, a);
  for (double lambda : {0.0, 0.25, 0.5, 1.0}) {
    for (double rho : {0.5, 1.0, 2.0}) {
      const VertexField w = weight_function(k, h, a, {lambda, rho});
      EXPECT_NEAR(w.values.dot(a.values), 1.0, 1e-12);
      EXPECT_TRUE((w.values.array() >= 0.0).all());
      // Oracle: direct evaluation of the two normalised terms.
      const Eigen::ArrayXd kp = k.values.array().abs().pow(rho);
      const Eigen::ArrayXd hp = h.values.array().abs().pow(rho);
      const Eigen::ArrayXd expect = lambda * kp / (kp * a.values.array()).sum() +
                                    (1 - lambda) * hp / (hp * a.values.array()).sum();
      EXPECT_LT((w.values.array() - expect).abs().maxCoeff(), 1e-10 * expect.maxCoeff());
    }
  }
}

TEST(WeightFunction, RejectsBadParameters) {
  const TriMesh m = shapes::icosphere(1);
  const VertexField a = voronoi_areas(m);
  const VertexField k = gaussian_curvature(m, a);
  const VertexField h = mean_curvature(m, a);
  EXPECT_THROW(weight_function(k, h, a, {1.5, 1.0}), RangeError);
  EXPECT_THROW(weight_function(k, h, a, {0.5, 0.0}), RangeError);
}

TEST(WeightFunction, DevelopableDropsGaussianTerm) {
  set_log_sink([](LogLevel, std::string_view) {});
  const TriMesh m = shapes::cylinder(0.5, 1.0, 24, 8);
  // Zero curvature everywhere on the cylinder except the boundary rows; use an
  // explicit zero field.
  const VertexField a = voronoi_areas(m);
  const VertexField zero{Eigen::VectorXd::Zero(a.size()), FieldKind::GaussianCurvature};
  const VertexField h = mean_curvature(m, a);
  const VertexField w = weight_function(zero, h, a, {0.5, 1.0});
  EXPECT_NEAR(w.values.dot(a.values), 1.0, 1e-12);
  const Eigen::ArrayXd expect = h.values.array().abs() / (h.values.array().abs() * a.values.array()).sum();
  EXPECT_LT((w.values.array() - expect).abs().maxCoeff(), 1e-12);
  set_log_sink({});
}

TEST(WeightFunction, BothZeroThrows) {
  const TriMesh m = shapes::planar_grid(4, 4);
  const VertexField a = voronoi_areas(m);
  const VertexField zero{Eigen::VectorXd::Zero(a.size()), FieldKind::GaussianCurvature};
  EXPECT_THROW(weight_function(zero, zero, a, {}), AllZeroCurvatureError);
}

TEST(ReweightedKernel, MatchesExplicitProduct) {
  Rng rng(2);
  const KernelMatrix plain = plain_kernel(test::random_cloud(rng, 30), 0.2);
  Eigen::VectorXd mu(30);
  for (int i = 0; i < 30; ++i) mu[i] = rng.uniform();
  const KernelMatrix r = reweighted_kernel(plain, mu);
  const Eigen::MatrixXd oracle = plain.entries.transpose() * mu.asDiagonal() * plain.entries;
  EXPECT_LT((r.entries - oracle).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_EQ(r.entries, r.entries.transpose());
  EXPECT_EQ(r.kind, KernelKind::Reweighted);
}

TEST(ReweightedKernel, RejectsMismatchAndNegativeMeasure) {
  const KernelMatrix plain = plain_kernel(shapes::icosahedron(), 0.5);
  EXPECT_THROW(reweighted_kernel(plain, Eigen::VectorXd::Ones(5)), DimensionMismatchError);
  Eigen::VectorXd mu = Eigen::VectorXd::Ones(12);
  mu[3] = -0.1;
  EXPECT_THROW(reweighted_kernel(plain, mu), RangeError);
}

// Property: every kernel variant is symmetric PSD on random perturbed meshes.
TEST(LandmarkingKernel, VariantsArePsd) {
  Rng rng(77);
  for (int trial = 0; trial < 6; ++trial) {
    const TriMesh m = shapes::displaced(shapes::icosphere(2), [&](const Eigen::Vector3d& p) {
      return Eigen::Vector3d(p * (1.0 + 0.15 * rng.uniform()));
    });
    for (KernelVariant v : {KernelVariant::Reweighted, KernelVariant::NonWeighted, KernelVariant::Euclidean}) {
      KernelConfig cfg;
      cfg.variant = v;
      const KernelMatrix k = landmarking_kernel(m, cfg);
      EXPECT_LT((k.entries - k.entries.transpose()).cwiseAbs().maxCoeff(), 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.entries, Eigen::EigenvaluesOnly);
      EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
    }
  }
}

TEST(LandmarkingKernel, NonWeightedUsesAreas) {
  const TriMesh m = shapes::hemisphere(4);
  KernelConfig cfg;
  cfg.variant = KernelVariant::NonWeighted;
  cfg.bandwidth = 0.1;
  const KernelMatrix k = landmarking_kernel(m, cfg);
  const KernelMatrix oracle = reweighted_kernel(plain_kernel(m, 0.1), voronoi_areas(m).values);
  EXPECT_LT((k.entries - oracle.entries).cwiseAbs().maxCoeff(), 1e-15);
}

}  // namespace
}  // namespace gplmk
