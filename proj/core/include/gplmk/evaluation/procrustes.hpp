#pragma once

#include <Eigen/Core>

#include "gplmk/mesh.hpp"
#include "gplmk/registration/surface_map.hpp"

namespace gplmk {

struct RigidAlignment {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double cost = 0.0;  // min sum_i w_i |R x_i + t - y_i|^2
  bool reflected = false;
};

// Weighted Kabsch: closed-form R, t minimising sum_i w_i |R x_i + t - y_i|^2,
// rows of X and Y paired. Proper rotations unless reflections are allowed.
RigidAlignment weighted_rigid_alignment(const Eigen::MatrixX3d& X, const Eigen::MatrixX3d& Y,
                                        const Eigen::VectorXd& weights, bool allow_reflection = false);

// sqrt((1/L) min_T sum_l |T(x_l) - y_l|^2) over rigid motions T. Needs L >= 3
// and neither configuration collinear (DegenerateConfigurationError).
double landmark_procrustes(const Eigen::MatrixX3d& X, const Eigen::MatrixX3d& Y, bool allow_reflection = false);

// sqrt(min_T sum_i nu(x_i) |f(x_i) - T(x_i)|^2), nu the mixed Voronoi areas of
// mesh1. Both meshes are expected at unit area.
double procrustes_of_map(const SurfaceMap& map, const TriMesh& mesh1, const TriMesh& mesh2,
                         bool allow_reflection = false);

}  // namespace gplmk
