#include "gplmk/evaluation/procrustes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "gplmk/errors.hpp"
#include "gplmk/geometry.hpp"

namespace gplmk {
namespace {

bool collinear(const Eigen::MatrixX3d& pts) {
  const Eigen::MatrixX3d centered = pts.rowwise() - pts.colwise().mean();
  const Eigen::Vector3d s = Eigen::JacobiSVD<Eigen::MatrixX3d>(centered).singularValues();
  return !(s[1] > 1e-10 * std::max(s[0], 1e-300));
}

}  // namespace

RigidAlignment weighted_rigid_alignment(const Eigen::MatrixX3d& X, const Eigen::MatrixX3d& Y,
                                        const Eigen::VectorXd& weights, bool allow_reflection) {
  if (X.rows() != Y.rows() || X.rows() != weights.size()) throw DimensionMismatchError("point sets differ in size");
  if ((weights.array() < 0.0).any()) throw RangeError("alignment weights must be nonnegative");
  const double total = weights.sum();
  if (!(total > 0.0)) throw RangeError("alignment weights sum to zero");

  const Eigen::RowVector3d cx = (weights.transpose() * X) / total;
  const Eigen::RowVector3d cy = (weights.transpose() * Y) / total;
  const Eigen::MatrixX3d xc = X.rowwise() - cx;
  const Eigen::MatrixX3d yc = Y.rowwise() - cy;
  const Eigen::Matrix3d cov = yc.transpose() * weights.asDiagonal() * xc;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  const bool improper = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0;
  RigidAlignment out;
  if (improper && !allow_reflection) d(2, 2) = -1.0;
  out.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  out.reflected = out.rotation.determinant() < 0.0;
  out.translation = cy.transpose() - out.rotation * cx.transpose();

  const Eigen::MatrixX3d moved = (X * out.rotation.transpose()).rowwise() + out.translation.transpose();
  out.cost = (weights.array() * (moved - Y).rowwise().squaredNorm().array()).sum();
  return out;
}

double landmark_procrustes(const Eigen::MatrixX3d& X, const Eigen::MatrixX3d& Y, bool allow_reflection) {
  if (X.rows() != Y.rows()) throw DimensionMismatchError("landmark counts differ");
  if (X.rows() < 3) throw RangeError("Procrustes distance needs at least 3 landmarks");
  if (collinear(X) || collinear(Y)) throw DegenerateConfigurationError("landmarks are collinear");
  const RigidAlignment a = weighted_rigid_alignment(X, Y, Eigen::VectorXd::Ones(X.rows()), allow_reflection);
  return std::sqrt(std::max(0.0, a.cost) / static_cast<double>(X.rows()));
}

double procrustes_of_map(const SurfaceMap& map, const TriMesh& mesh1, const TriMesh& mesh2, bool allow_reflection) {
  if (map.images.size() != mesh1.num_vertices()) throw DimensionMismatchError("map does not cover the source mesh");
  for (const SurfacePoint& s : map.images) {
    if (s.triangle < 0 || static_cast<std::size_t>(s.triangle) >= mesh2.num_triangles() ||
        (s.bary.array() < -1e-12).any() || std::abs(s.bary.sum() - 1.0) > 1e-9) {
      throw RangeError("map image is not a valid point on the target mesh");
    }
  }
  Eigen::MatrixX3d x(static_cast<Eigen::Index>(mesh1.num_vertices()), 3);
  for (std::size_t i = 0; i < mesh1.num_vertices(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = mesh1.vertex(static_cast<VertexId>(i)).transpose();
  }
  const VertexField nu = voronoi_areas(mesh1);
  const RigidAlignment a = weighted_rigid_alignment(x, map.image_points(mesh2), nu.values, allow_reflection);
  return std::sqrt(std::max(0.0, a.cost));
}

}  // namespace gplmk
