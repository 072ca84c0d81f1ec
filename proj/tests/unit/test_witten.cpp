#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gplmk/errors.hpp"
#include "gplmk/shapes.hpp"
#include "gplmk/witten.hpp"

namespace gplmk {
namespace {

TEST(Witten, SymmetricWithRowSums) {
  Rng rng(4);
  const KernelMatrix plain = plain_kernel(test::random_cloud(rng, 40), 0.1);
  Eigen::VectorXd mu(40);
  for (int i = 0; i < 40; ++i) mu[i] = 0.2 + rng.uniform();
  const KernelMatrix k = reweighted_kernel(plain, mu);
  const WittenOperator op = witten_operator(k);
  const Eigen::VectorXd d = k.entries.rowwise().sum();
  EXPECT_LT((op.row_sums - d).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd oracle = d.cwiseSqrt().cwiseInverse().asDiagonal() * k.entries *
                                 d.cwiseSqrt().cwiseInverse().asDiagonal();
  EXPECT_LT((op.matrix - oracle).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Witten, LeadingEigenpairIsStationary) {
  const TriMesh m = shapes::icosphere(2);
  Eigen::VectorXd v(static_cast<Eigen::Index>(m.num_vertices()));
  for (std::size_t i = 0; i < m.num_vertices(); ++i) v[static_cast<Eigen::Index>(i)] = m.vertices()[i].z();
  const WittenOperator op = witten_operator(m, {v, FieldKind::Potential}, 0.5, 0.1);
  const EigenPairs p = localized_eigenfunctions(op, 3);
  EXPECT_NEAR(p.values[0], 1.0, 1e-10);
  const Eigen::VectorXd expect = op.row_sums.cwiseSqrt().normalized();
  EXPECT_NEAR(std::abs(p.vectors.col(0).dot(expect)), 1.0, 1e-8);
  EXPECT_GE(p.values[0], p.values[1]);
  EXPECT_GE(p.values[1], p.values[2]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix, Eigen::EigenvaluesOnly);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-10);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1.0 - 1e-10);
}

TEST(Witten, ZeroRowSumThrows) {
  const KernelMatrix plain = plain_kernel(shapes::icosahedron(), 0.5);
  const KernelMatrix k = reweighted_kernel(plain, Eigen::VectorXd::Zero(12));
  EXPECT_THROW(witten_operator(k), ZeroRowSumError);
}

TEST(Witten, MassFraction) {
  Eigen::VectorXd v(4);
  v << 1, 1, 1, 1;
  const VertexId region[] = {0, 2};
  EXPECT_DOUBLE_EQ(mass_fraction(v, region), 0.5);
}

TEST(Witten, SingleWellConcentrates) {
  const TriMesh m = shapes::icosphere(3);
  const Eigen::Vector3d c(0, 0, 1);
  Eigen::VectorXd v(static_cast<Eigen::Index>(m.num_vertices()));
  std::vector<VertexId> ball;
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    const double d2 = (m.vertices()[i] - c).squaredNorm();
    v[static_cast<Eigen::Index>(i)] = 1.0 - std::exp(-d2 / (2 * 0.35 * 0.35));
    if (d2 < 0.5 * 0.5) ball.push_back(static_cast<VertexId>(i));
  }
  const WittenOperator op = witten_operator(m, {v, FieldKind::Potential}, 0.05, 0.05);
  const EigenPairs p = localized_eigenfunctions(op, 1);
  EXPECT_GT(mass_fraction(p.vectors.col(0), ball), 0.8);
}

}  // namespace
}  // namespace gplmk
