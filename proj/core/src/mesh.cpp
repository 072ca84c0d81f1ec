#include "gplmk/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "gplmk/errors.hpp"

namespace gplmk {
namespace {

std::uint64_t directed_key(VertexId a, VertexId b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

TriMesh::TriMesh(std::vector<Eigen::Vector3d> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty() || triangles_.empty()) {
    throw TopologyError("mesh must contain at least one triangle");
  }
  const auto nv = static_cast<VertexId>(vertices_.size());
  for (std::size_t f = 0; f < triangles_.size(); ++f) {
    const Triangle& t = triangles_[f];
    for (VertexId v : t) {
      if (v < 0 || v >= nv) {
        std::ostringstream msg;
        msg << "triangle " << f << " references vertex " << v << " of " << nv;
        throw RangeError(msg.str());
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw DegenerateTriangleError("triangle " + std::to_string(f) + " repeats a vertex");
    }
  }

  Eigen::Vector3d lo = vertices_.front();
  Eigen::Vector3d hi = vertices_.front();
  for (const auto& p : vertices_) {
    if (!p.allFinite()) throw ParseError("non-finite vertex coordinate");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bbox_diagonal_ = (hi - lo).norm();

  validate_geometry();
  build_adjacency();
}

void TriMesh::validate_geometry() const {
  const double threshold = 1e-14 * bbox_diagonal_ * bbox_diagonal_;
  for (std::size_t f = 0; f < triangles_.size(); ++f) {
    if (!(triangle_area(f) > threshold)) {
      throw DegenerateTriangleError("triangle " + std::to_string(f) + " has (near-)zero area");
    }
  }
}

void TriMesh::build_adjacency() {
  const std::size_t nv = vertices_.size();
  const std::size_t nf = triangles_.size();

  // Directed half-edges must be unique for a consistently oriented manifold.
  std::unordered_map<std::uint64_t, std::int32_t> half_edges;
  half_edges.reserve(3 * nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const Triangle& t = triangles_[f];
    for (int k = 0; k < 3; ++k) {
      const VertexId a = t[k];
      const VertexId b = t[(k + 1) % 3];
      if (!half_edges.emplace(directed_key(a, b), static_cast<std::int32_t>(f)).second) {
        std::ostringstream msg;
        msg << "edge (" << a << "," << b << ") is non-manifold or inconsistently oriented";
        throw TopologyError(msg.str());
      }
    }
  }

  // Undirected edges in a deterministic order.
  std::map<std::pair<VertexId, VertexId>, std::size_t> edge_index;
  for (std::size_t f = 0; f < nf; ++f) {
    const Triangle& t = triangles_[f];
    for (int k = 0; k < 3; ++k) {
      VertexId a = t[k];
      VertexId b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_index.emplace(std::make_pair(a, b), edges_.size());
      if (inserted) {
        MeshEdge e;
        e.a = a;
        e.b = b;
        e.faces = {static_cast<std::int32_t>(f), -1};
        edges_.push_back(e);
      } else {
        MeshEdge& e = edges_[it->second];
        if (e.faces[1] >= 0) throw TopologyError("edge shared by more than two triangles");
        e.faces[1] = static_cast<std::int32_t>(f);
      }
    }
  }
  // Re-sort edges lexicographically for stable downstream iteration.
  std::sort(edges_.begin(), edges_.end(), [](const MeshEdge& x, const MeshEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });

  // Vertex -> neighbours, vertex -> faces (CSR).
  std::vector<std::vector<VertexId>> nbrs(nv);
  for (const MeshEdge& e : edges_) {
    nbrs[static_cast<std::size_t>(e.a)].push_back(e.b);
    nbrs[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  std::vector<std::vector<std::int32_t>> faces(nv);
  for (std::size_t f = 0; f < nf; ++f) {
    for (VertexId v : triangles_[f]) faces[static_cast<std::size_t>(v)].push_back(static_cast<std::int32_t>(f));
  }
  neighbor_offsets_.assign(nv + 1, 0);
  face_offsets_.assign(nv + 1, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    if (faces[v].empty()) throw TopologyError("isolated vertex " + std::to_string(v));
    std::sort(nbrs[v].begin(), nbrs[v].end());
    neighbor_offsets_[v + 1] = neighbor_offsets_[v] + static_cast<std::int32_t>(nbrs[v].size());
    face_offsets_[v + 1] = face_offsets_[v] + static_cast<std::int32_t>(faces[v].size());
    neighbor_list_.insert(neighbor_list_.end(), nbrs[v].begin(), nbrs[v].end());
    face_list_.insert(face_list_.end(), faces[v].begin(), faces[v].end());
  }

  // Vertex manifoldness: the link of every vertex is a single path or cycle.
  for (std::size_t v = 0; v < nv; ++v) {
    std::unordered_map<VertexId, VertexId> next;
    std::unordered_map<VertexId, int> indegree;
    for (std::int32_t f : faces[v]) {
      const Triangle& t = triangles_[static_cast<std::size_t>(f)];
      int k = 0;
      while (t[k] != static_cast<VertexId>(v)) ++k;
      const VertexId a = t[(k + 1) % 3];
      const VertexId b = t[(k + 2) % 3];
      next[a] = b;
      ++indegree[b];
      indegree.try_emplace(a, 0);
    }
    int starts = 0;
    VertexId start = next.begin()->first;
    for (const auto& [node, deg] : indegree) {
      if (deg == 0) {
        ++starts;
        start = node;
      }
    }
    if (starts > 1) throw TopologyError("vertex " + std::to_string(v) + " is non-manifold");
    std::size_t visited = 0;
    VertexId cur = start;
    for (;;) {
      auto it = next.find(cur);
      if (it == next.end()) break;
      ++visited;
      cur = it->second;
      if (cur == start) break;
      if (visited > next.size()) break;
    }
    if (visited != next.size()) throw TopologyError("vertex " + std::to_string(v) + " is non-manifold");
  }

  // Boundary loops from unpaired half-edges; each boundary vertex has exactly
  // one outgoing boundary half-edge once vertex manifoldness holds.
  boundary_vertex_.assign(nv, 0);
  std::map<VertexId, VertexId> boundary_next;
  for (std::size_t f = 0; f < nf; ++f) {
    const Triangle& t = triangles_[f];
    for (int k = 0; k < 3; ++k) {
      const VertexId a = t[k];
      const VertexId b = t[(k + 1) % 3];
      if (!half_edges.contains(directed_key(b, a))) {
        boundary_next[a] = b;
        boundary_vertex_[static_cast<std::size_t>(a)] = 1;
        boundary_vertex_[static_cast<std::size_t>(b)] = 1;
      }
    }
  }
  std::vector<std::uint8_t> used(nv, 0);
  for (const auto& [first, unused] : boundary_next) {
    (void)unused;
    if (used[static_cast<std::size_t>(first)]) continue;
    std::vector<VertexId> loop;
    VertexId cur = first;
    while (!used[static_cast<std::size_t>(cur)]) {
      used[static_cast<std::size_t>(cur)] = 1;
      loop.push_back(cur);
      cur = boundary_next.at(cur);
    }
    boundary_loops_.push_back(std::move(loop));
  }

  std::vector<std::uint8_t> seen(nv, 0);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (VertexId w : neighbors(v)) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  connected_ = reached == nv;
}

std::span<const VertexId> TriMesh::neighbors(VertexId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {neighbor_list_.data() + neighbor_offsets_[i],
          static_cast<std::size_t>(neighbor_offsets_[i + 1] - neighbor_offsets_[i])};
}

std::span<const std::int32_t> TriMesh::incident_triangles(VertexId v) const {
  const auto i = static_cast<std::size_t>(v);
  return {face_list_.data() + face_offsets_[i],
          static_cast<std::size_t>(face_offsets_[i + 1] - face_offsets_[i])};
}

int TriMesh::euler_characteristic() const {
  return static_cast<int>(vertices_.size()) - static_cast<int>(edges_.size()) +
         static_cast<int>(triangles_.size());
}

bool TriMesh::is_disk_type() const {
  return connected_ && boundary_loops_.size() == 1 && euler_characteristic() == 1;
}

double TriMesh::triangle_area(std::size_t f) const {
  const Triangle& t = triangles_[f];
  const Eigen::Vector3d& p0 = vertex(t[0]);
  return 0.5 * (vertex(t[1]) - p0).cross(vertex(t[2]) - p0).norm();
}

Eigen::Vector3d TriMesh::triangle_normal(std::size_t f) const {
  const Triangle& t = triangles_[f];
  const Eigen::Vector3d& p0 = vertex(t[0]);
  return (vertex(t[1]) - p0).cross(vertex(t[2]) - p0).normalized();
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t f = 0; f < triangles_.size(); ++f) sum += triangle_area(f);
  return sum;
}

TriMesh TriMesh::transformed(const Eigen::Affine3d& transform) const {
  std::vector<Eigen::Vector3d> moved;
  moved.reserve(vertices_.size());
  for (const auto& p : vertices_) moved.push_back(transform * p);
  return TriMesh(std::move(moved), triangles_);
}

TriMesh TriMesh::normalized_to_unit_area() const {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  double area = 0.0;
  for (std::size_t f = 0; f < triangles_.size(); ++f) {
    const Triangle& t = triangles_[f];
    const double a = triangle_area(f);
    centroid += a * (vertex(t[0]) + vertex(t[1]) + vertex(t[2])) / 3.0;
    area += a;
  }
  centroid /= area;
  const double s = 1.0 / std::sqrt(area);
  Eigen::Affine3d xf = Eigen::Affine3d::Identity();
  xf.scale(s);
  xf.translate(-centroid);
  return transformed(xf);
}

}  // namespace gplmk
