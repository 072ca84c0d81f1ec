#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "gplmk/mesh.hpp"

namespace gplmk {

// Planar embedding of a disk-type mesh, one uv point per vertex.
struct PlanarParam {
  Eigen::MatrixX2d uv;
  std::vector<VertexId> boundary;  // boundary loop of the source mesh
  double initial_energy = 0.0;     // energy of the Tutte start
  double energy = 0.0;             // final isometric distortion energy
  int iterations = 0;
  std::vector<double> energy_history;  // one entry per accepted iterate, starting at the initial energy
};

// Per-triangle rest shape: the triangle laid out isometrically in the plane.
// Used both for 3D meshes and for planar domains (where it is the identity).
struct RestFrames {
  // coef[f].col(c) gives the derivative weights of the three corners for
  // Jacobian column c; J = [q0 q1 q2] * coef[f] (2x3 times 3x2).
  std::vector<Eigen::Matrix<double, 3, 2>> coef;
  Eigen::VectorXd areas;
};

RestFrames rest_frames(const TriMesh& mesh);
RestFrames rest_frames(const TriMesh& mesh, const Eigen::MatrixX2d& planar_rest);

// Symmetric isometric distortion energy 1/2 sum_f A_f (|J_f|^2 + |J_f^-1|^2).
// Rigid motions attain the minimum 2 * total area. Returns +inf if any
// triangle is degenerate or inverted.
double isometric_energy(const RestFrames& rest, const TriMesh& mesh, const Eigen::MatrixX2d& uv);

// Triangles with nonpositive signed area in uv.
std::size_t count_flipped(const TriMesh& mesh, const Eigen::MatrixX2d& uv);

// Uniform-weight Tutte embedding; the boundary goes to a circle of the
// mesh's area, by arc length, starting at the lowest-index boundary vertex.
// Throws NotDiskTypeError, FlipRecoveryError.
PlanarParam tutte_embedding(const TriMesh& mesh);

struct ParamOptions {
  int max_iterations = 500;
  double tolerance = 1e-7;  // stop when the relative energy decrease drops below
};

// Local-global descent of the isometric energy from the Tutte start with a
// line search that never lets a triangle invert. Throws NotDiskTypeError,
// FlipRecoveryError.
PlanarParam aiap_parametrize(const TriMesh& mesh, const ParamOptions& options = {});

struct PositionalConstraint {
  VertexId vertex;
  Eigen::Vector2d target;
};

struct ConstrainedResult {
  Eigen::MatrixX2d uv;
  double energy = 0.0;
  int iterations = 0;
};

// Minimises the isometric energy of the map from `rest` to the plane starting
// at `start` (which must be flip-free), with the constrained vertices pulled
// onto their targets by a stiff penalty and finally placed exactly.
// Throws ConstraintInfeasibleError if the exact placement would invert a
// triangle.
ConstrainedResult constrained_descent(const TriMesh& mesh, const RestFrames& rest, const Eigen::MatrixX2d& start,
                                      std::span<const PositionalConstraint> constraints,
                                      const ParamOptions& options = {});

}  // namespace gplmk
