#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "gplmk/mesh.hpp"
#include "gplmk/registration/matching.hpp"
#include "gplmk/registration/parametrization.hpp"

namespace gplmk {

// A point on a mesh: triangle id plus barycentric weights (nonnegative, sum 1).
struct SurfacePoint {
  std::int32_t triangle = -1;
  Eigen::Vector3d bary = Eigen::Vector3d::Zero();

  Eigen::Vector3d position(const TriMesh& mesh) const;
};

struct SurfaceMap {
  std::vector<SurfacePoint> images;      // one per source vertex
  std::vector<std::uint8_t> constrained;  // 1 where a correspondence pinned the vertex
  std::vector<std::uint8_t> projected;    // 1 where the planar image fell outside the target domain
  Eigen::MatrixX2d planar;                // source vertices in the target domain
  double energy = 0.0;                    // isometric energy of the planar map

  Eigen::MatrixX3d image_points(const TriMesh& target) const;
};

// Point location in a flat triangulation via a uniform grid.
class PlanarLocator {
 public:
  PlanarLocator(const TriMesh& mesh, const Eigen::MatrixX2d& uv);

  // Containing triangle, or the nearest one (projected = true) when the point
  // is outside the domain.
  SurfacePoint locate(const Eigen::Vector2d& p, bool& projected) const;

 private:
  bool barycentric(std::size_t f, const Eigen::Vector2d& p, Eigen::Vector3d& bary) const;
  SurfacePoint nearest(const Eigen::Vector2d& p) const;

  const TriMesh& mesh_;
  const Eigen::MatrixX2d& uv_;
  Eigen::Vector2d lo_;
  double cell_ = 1.0;
  int nx_ = 1;
  int ny_ = 1;
  std::vector<std::vector<std::int32_t>> cells_;
};

// Planar map from the source domain to the target domain minimising the
// isometric energy with every correspondence pinned exactly, composed with
// both parametrizations into per-vertex images on `mesh2`. Throws
// DegenerateConfigurationError for fewer than 3 or collinear constraints,
// ConstraintInfeasibleError.
SurfaceMap interpolate_map(const TriMesh& mesh1, const PlanarParam& p1, const PlanarParam& p2,
                           const CorrespondenceSet& corr, const TriMesh& mesh2, const ParamOptions& options = {});

// CSV "vertex,triangle,b0,b1,b2".
void write_map_csv(const SurfaceMap& map, std::ostream& out);
// CSV "index1,index2".
void write_correspondences_csv(const CorrespondenceSet& corr, std::ostream& out);

}  // namespace gplmk
