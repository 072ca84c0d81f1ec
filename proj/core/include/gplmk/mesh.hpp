#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gplmk {

using VertexId = std::int32_t;
using Triangle = std::array<VertexId, 3>;

struct MeshEdge {
  VertexId a = 0;  // a < b
  VertexId b = 0;
  // Incident triangle ids; faces[1] == -1 on boundary edges.
  std::array<std::int32_t, 2> faces{-1, -1};

  bool is_boundary() const { return faces[1] < 0; }
};

// Immutable, validated triangle mesh.
//
// Construction checks index ranges, degenerate triangles (area below
// 1e-14 * bbox_diagonal^2), isolated vertices, edge- and vertex-manifoldness,
// and consistent orientation. Vertex order is never changed, so indices stay
// stable with respect to the source file.
class TriMesh {
 public:
  TriMesh(std::vector<Eigen::Vector3d> vertices, std::vector<Triangle> triangles);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
  const Eigen::Vector3d& vertex(VertexId v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Triangle& triangle(std::size_t f) const { return triangles_[f]; }
  const std::vector<MeshEdge>& edges() const { return edges_; }

  // Sorted one-ring neighbours.
  std::span<const VertexId> neighbors(VertexId v) const;
  std::span<const std::int32_t> incident_triangles(VertexId v) const;

  bool is_boundary_vertex(VertexId v) const { return boundary_vertex_[static_cast<std::size_t>(v)] != 0; }
  // Boundary loops, each ordered along the face orientation.
  const std::vector<std::vector<VertexId>>& boundary_loops() const { return boundary_loops_; }

  int euler_characteristic() const;
  bool is_closed() const { return boundary_loops_.empty(); }
  bool is_connected() const { return connected_; }
  // Connected, exactly one boundary loop, Euler characteristic 1.
  bool is_disk_type() const;

  double bounding_box_diagonal() const { return bbox_diagonal_; }
  double triangle_area(std::size_t f) const;
  Eigen::Vector3d triangle_normal(std::size_t f) const;  // unit length
  double total_area() const;

  // Returns a copy with every vertex mapped through `transform`.
  TriMesh transformed(const Eigen::Affine3d& transform) const;
  // Uniformly scaled about the area centroid so that total_area() == 1.
  TriMesh normalized_to_unit_area() const;

 private:
  void build_adjacency();
  void validate_geometry() const;

  std::vector<Eigen::Vector3d> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<MeshEdge> edges_;

  std::vector<std::int32_t> neighbor_offsets_;
  std::vector<VertexId> neighbor_list_;
  std::vector<std::int32_t> face_offsets_;
  std::vector<std::int32_t> face_list_;
  std::vector<std::uint8_t> boundary_vertex_;
  std::vector<std::vector<VertexId>> boundary_loops_;
  bool connected_ = false;
  double bbox_diagonal_ = 0.0;
};

}  // namespace gplmk
