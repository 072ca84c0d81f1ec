#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gplmk/mesh.hpp"

namespace gplmk {

enum class FieldKind {
  GaussianCurvature,
  MeanCurvature,
  VoronoiArea,
  Weight,
  Potential,
  Uncertainty,
};

std::string_view to_string(FieldKind kind);

// One scalar per mesh vertex, tagged with what it measures.
struct VertexField {
  Eigen::VectorXd values;
  FieldKind kind = FieldKind::Potential;

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index i) const { return values[i]; }
};

// Mixed Voronoi areas (Meyer et al.): circumcentric cells for non-obtuse
// triangles, area/2 vs area/4 split for obtuse ones. Sums to the surface area.
VertexField voronoi_areas(const TriMesh& mesh);

// Interior corner angle sum at each vertex.
Eigen::VectorXd angle_sums(const TriMesh& mesh);

// Angle defect divided by the mixed area; boundary vertices use pi as the
// reference angle instead of 2*pi.
VertexField gaussian_curvature(const TriMesh& mesh, const VertexField& areas);
VertexField gaussian_curvature(const TriMesh& mesh);

// Half the magnitude of the cotangent mean-curvature normal over the mixed
// area, positive when the normal agrees with the outward (face-orientation)
// normal. At boundary vertices only the component along the vertex normal is
// kept, since the tangential part measures boundary (geodesic) curvature.
VertexField mean_curvature(const TriMesh& mesh, const VertexField& areas);
VertexField mean_curvature(const TriMesh& mesh);

// Positive semidefinite cotangent Laplacian: L(i,j) = -(cot a + cot b)/2 on
// edges, rows sum to zero.
Eigen::SparseMatrix<double> cotan_laplacian(const TriMesh& mesh);

// Area-weighted vertex normals (unit length).
std::vector<Eigen::Vector3d> vertex_normals(const TriMesh& mesh);

struct GeodesicOptions {
  // Adds edge midpoints and intra-triangle midpoint/vertex links to the graph
  // before running Dijkstra, which tightens the edge-graph overestimate.
  bool refine_midpoints = false;
};

// Multi-source shortest-path distances over the mesh edge graph (Dijkstra).
// Throws DisconnectedMeshError if any vertex is unreachable.
Eigen::VectorXd geodesic_distances(const TriMesh& mesh, std::span<const VertexId> sources,
                                   const GeodesicOptions& options = {});

struct VertexSnap {
  std::vector<VertexId> indices;
  std::vector<double> distances;  // Euclidean snap distance per input point
};

// Nearest mesh vertex for each input point (ties -> lowest index).
VertexSnap snap_to_vertices(const TriMesh& mesh, std::span<const Eigen::Vector3d> points);

}  // namespace gplmk
