#include "gplmk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>

#include "gplmk/errors.hpp"

namespace gplmk {
namespace {

struct Corner {
  double angle;
  double cot;
};

// Corner data for triangle f, indexed like the triangle's vertices.
std::array<Corner, 3> corners(const TriMesh& mesh, std::size_t f) {
  const Triangle& t = mesh.triangle(f);
  std::array<Corner, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d& p = mesh.vertex(t[k]);
    const Eigen::Vector3d u = mesh.vertex(t[(k + 1) % 3]) - p;
    const Eigen::Vector3d v = mesh.vertex(t[(k + 2) % 3]) - p;
    const double cross = u.cross(v).norm();
    const double dot = u.dot(v);
    out[static_cast<std::size_t>(k)] = {std::atan2(cross, dot), dot / cross};
  }
  return out;
}

}  // namespace

std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::GaussianCurvature: return "gaussian_curvature";
    case FieldKind::MeanCurvature: return "mean_curvature";
    case FieldKind::VoronoiArea: return "voronoi_area";
    case FieldKind::Weight: return "weight";
    case FieldKind::Potential: return "potential";
    case FieldKind::Uncertainty: return "uncertainty";
  }
  return "unknown";
}

VertexField voronoi_areas(const TriMesh& mesh) {
  Eigen::VectorXd area = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  const double threshold = 1e-14 * mesh.bounding_box_diagonal() * mesh.bounding_box_diagonal();
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Triangle& t = mesh.triangle(f);
    const double tri_area = mesh.triangle_area(f);
    if (!(tri_area > threshold)) {
      throw DegenerateTriangleError("triangle " + std::to_string(f) + " has (near-)zero area");
    }
    const auto c = corners(mesh, f);
    int obtuse = -1;
    for (int k = 0; k < 3; ++k) {
      if (c[static_cast<std::size_t>(k)].angle > std::numbers::pi / 2) obtuse = k;
    }
    if (obtuse >= 0) {
      for (int k = 0; k < 3; ++k) area[t[k]] += (k == obtuse ? 0.5 : 0.25) * tri_area;
      continue;
    }
    // Circumcentric: vertex k gets (|e_k,k+1|^2 cot(corner k+2) + |e_k,k+2|^2 cot(corner k+1)) / 8.
    for (int k = 0; k < 3; ++k) {
      const int k1 = (k + 1) % 3;
      const int k2 = (k + 2) % 3;
      const Eigen::Vector3d& p = mesh.vertex(t[k]);
      const double l1 = (mesh.vertex(t[k1]) - p).squaredNorm();
      const double l2 = (mesh.vertex(t[k2]) - p).squaredNorm();
      area[t[k]] += (l1 * c[static_cast<std::size_t>(k2)].cot + l2 * c[static_cast<std::size_t>(k1)].cot) / 8.0;
    }
  }
  return {std::move(area), FieldKind::VoronoiArea};
}

Eigen::VectorXd angle_sums(const TriMesh& mesh) {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Triangle& t = mesh.triangle(f);
    const auto c = corners(mesh, f);
    for (int k = 0; k < 3; ++k) sums[t[k]] += c[static_cast<std::size_t>(k)].angle;
  }
  return sums;
}

VertexField gaussian_curvature(const TriMesh& mesh, const VertexField& areas) {
  if (areas.size() != static_cast<Eigen::Index>(mesh.num_vertices())) {
    throw DimensionMismatchError("area field does not match mesh");
  }
  const Eigen::VectorXd sums = angle_sums(mesh);
  Eigen::VectorXd kappa(sums.size());
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    const double full = mesh.is_boundary_vertex(static_cast<VertexId>(i)) ? std::numbers::pi : 2.0 * std::numbers::pi;
    kappa[i] = (full - sums[i]) / areas[i];
  }
  return {std::move(kappa), FieldKind::GaussianCurvature};
}

VertexField gaussian_curvature(const TriMesh& mesh) { return gaussian_curvature(mesh, voronoi_areas(mesh)); }

Eigen::SparseMatrix<double> cotan_laplacian(const TriMesh& mesh) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(12 * mesh.num_triangles());
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Triangle& t = mesh.triangle(f);
    const auto c = corners(mesh, f);
    for (int k = 0; k < 3; ++k) {
      // Edge opposite corner k.
      const VertexId i = t[(k + 1) % 3];
      const VertexId j = t[(k + 2) % 3];
      const double w = 0.5 * c[static_cast<std::size_t>(k)].cot;
      entries.emplace_back(i, j, -w);
      entries.emplace_back(j, i, -w);
      entries.emplace_back(i, i, w);
      entries.emplace_back(j, j, w);
    }
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(entries.begin(), entries.end());
  return lap;
}

std::vector<Eigen::Vector3d> vertex_normals(const TriMesh& mesh) {
  std::vector<Eigen::Vector3d> normals(mesh.num_vertices(), Eigen::Vector3d::Zero());
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Triangle& t = mesh.triangle(f);
    const Eigen::Vector3d& p0 = mesh.vertex(t[0]);
    const Eigen::Vector3d n = (mesh.vertex(t[1]) - p0).cross(mesh.vertex(t[2]) - p0);
    for (VertexId v : t) normals[static_cast<std::size_t>(v)] += n;
  }
  for (auto& n : normals) n.normalize();
  return normals;
}

VertexField mean_curvature(const TriMesh& mesh, const VertexField& areas) {
  if (areas.size() != static_cast<Eigen::Index>(mesh.num_vertices())) {
    throw DimensionMismatchError("area field does not match mesh");
  }
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  Eigen::MatrixXd positions(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) positions.row(i) = mesh.vertex(static_cast<VertexId>(i)).transpose();
  const Eigen::MatrixXd lx = cotan_laplacian(mesh) * positions;
  const auto normals = vertex_normals(mesh);

  Eigen::VectorXd eta(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d hn = lx.row(i).transpose();
    const Eigen::Vector3d& nrm = normals[static_cast<std::size_t>(i)];
    const double along = hn.dot(nrm);
    const double magnitude = mesh.is_boundary_vertex(static_cast<VertexId>(i)) ? std::abs(along) : hn.norm();
    eta[i] = (along >= 0.0 ? 1.0 : -1.0) * magnitude / (2.0 * areas[i]);
  }
  return {std::move(eta), FieldKind::MeanCurvature};
}

VertexField mean_curvature(const TriMesh& mesh) { return mean_curvature(mesh, voronoi_areas(mesh)); }

Eigen::VectorXd geodesic_distances(const TriMesh& mesh, std::span<const VertexId> sources,
                                   const GeodesicOptions& options) {
  const std::size_t nv = mesh.num_vertices();
  if (sources.empty()) throw RangeError("geodesic_distances needs at least one source");
  for (VertexId s : sources) {
    if (s < 0 || static_cast<std::size_t>(s) >= nv) throw RangeError("geodesic source out of range");
  }

  // Adjacency over vertices, plus edge midpoints when refining.
  struct Arc {
    std::size_t to;
    double length;
  };
  const std::size_t n_nodes = options.refine_midpoints ? nv + mesh.num_edges() : nv;
  std::vector<std::vector<Arc>> graph(n_nodes);
  auto link = [&](std::size_t a, std::size_t b, double len) {
    graph[a].push_back({b, len});
    graph[b].push_back({a, len});
  };
  std::vector<Eigen::Vector3d> node_pos;
  if (options.refine_midpoints) {
    node_pos = mesh.vertices();
    node_pos.reserve(n_nodes);
  }
  for (const MeshEdge& e : mesh.edges()) {
    const double len = (mesh.vertex(e.a) - mesh.vertex(e.b)).norm();
    link(static_cast<std::size_t>(e.a), static_cast<std::size_t>(e.b), len);
    if (options.refine_midpoints) {
      const std::size_t mid = node_pos.size();
      node_pos.push_back(0.5 * (mesh.vertex(e.a) + mesh.vertex(e.b)));
      link(static_cast<std::size_t>(e.a), mid, 0.5 * len);
      link(static_cast<std::size_t>(e.b), mid, 0.5 * len);
    }
  }
  if (options.refine_midpoints) {
    // Edges are sorted by (a, b); look up midpoint ids by binary search.
    const auto& edges = mesh.edges();
    auto midpoint_of = [&](VertexId a, VertexId b) {
      if (a > b) std::swap(a, b);
      auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(a, b),
                                 [](const MeshEdge& e, const std::pair<VertexId, VertexId>& key) {
                                   return std::make_pair(e.a, e.b) < key;
                                 });
      return nv + static_cast<std::size_t>(it - edges.begin());
    };
    for (const Triangle& t : mesh.triangles()) {
      std::array<std::size_t, 3> mids{};
      for (int k = 0; k < 3; ++k) mids[static_cast<std::size_t>(k)] = midpoint_of(t[(k + 1) % 3], t[(k + 2) % 3]);
      for (int k = 0; k < 3; ++k) {
        const auto v = static_cast<std::size_t>(t[k]);
        const std::size_t m = mids[static_cast<std::size_t>(k)];
        link(v, m, (node_pos[v] - node_pos[m]).norm());
        const std::size_t m2 = mids[static_cast<std::size_t>((k + 1) % 3)];
        link(m, m2, (node_pos[m] - node_pos[m2]).norm());
      }
    }
  }

  std::vector<double> dist(n_nodes, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (VertexId s : sources) {
    dist[static_cast<std::size_t>(s)] = 0.0;
    heap.emplace(0.0, static_cast<std::size_t>(s));
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const Arc& arc : graph[u]) {
      const double nd = d + arc.length;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        heap.emplace(nd, arc.to);
      }
    }
  }

  Eigen::VectorXd out(static_cast<Eigen::Index>(nv));
  for (std::size_t i = 0; i < nv; ++i) {
    if (!std::isfinite(dist[i])) throw DisconnectedMeshError("vertex " + std::to_string(i) + " is unreachable");
    out[static_cast<Eigen::Index>(i)] = dist[i];
  }
  return out;
}

VertexSnap snap_to_vertices(const TriMesh& mesh, std::span<const Eigen::Vector3d> points) {
  VertexSnap snap;
  snap.indices.reserve(points.size());
  snap.distances.reserve(points.size());
  for (const auto& p : points) {
    VertexId best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
      const double d2 = (mesh.vertex(static_cast<VertexId>(i)) - p).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = static_cast<VertexId>(i);
      }
    }
    snap.indices.push_back(best);
    snap.distances.push_back(std::sqrt(best_d2));
  }
  return snap;
}

}  // namespace gplmk
