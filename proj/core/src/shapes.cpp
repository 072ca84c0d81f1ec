#include "gplmk/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "gplmk/errors.hpp"

namespace gplmk::shapes {
namespace {

constexpr double kPi = std::numbers::pi;

double signed_area_2d(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Triangles of the concentric-ring disk, all counter-clockwise seen from +z.
void disk_layout(int rings, double radius, std::vector<Eigen::Vector3d>& verts, std::vector<Triangle>& tris) {
  if (rings < 1) throw RangeError("disk needs at least one ring");
  verts.clear();
  tris.clear();
  verts.emplace_back(0.0, 0.0, 0.0);
  std::vector<VertexId> prev{0};
  std::vector<double> prev_angle{0.0};
  for (int k = 1; k <= rings; ++k) {
    const int count = 6 * k;
    const double r = radius * k / rings;
    const double offset = (k % 2) * kPi / count;
    std::vector<VertexId> ring;
    std::vector<double> angle;
    for (int i = 0; i < count; ++i) {
      const double a = offset + 2.0 * kPi * i / count;
      ring.push_back(static_cast<VertexId>(verts.size()));
      angle.push_back(a);
      verts.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
    }
    if (k == 1) {
      for (int i = 0; i < count; ++i) tris.push_back({0, ring[i], ring[(i + 1) % count]});
    } else {
      // Zip the two rings together in angular order; angles as turns, not wrapped.
      const auto n_in = prev.size();
      const auto n_out = ring.size();
      auto turn_in = [&](std::size_t i) { return prev_angle[0] / (2.0 * kPi) + static_cast<double>(i) / n_in; };
      auto turn_out = [&](std::size_t j) { return angle[0] / (2.0 * kPi) + static_cast<double>(j) / n_out; };
      std::size_t i = 0;
      std::size_t j = 0;
      while (i < n_in || j < n_out) {
        if (j < n_out && (i == n_in || turn_out(j + 1) <= turn_in(i + 1))) {
          tris.push_back({prev[i % n_in], ring[j], ring[(j + 1) % n_out]});
          ++j;
        } else {
          tris.push_back({prev[i], ring[j % n_out], prev[(i + 1) % n_in]});
          ++i;
        }
      }
    }
    prev = std::move(ring);
    prev_angle = std::move(angle);
  }
  for (Triangle& t : tris) {
    if (signed_area_2d(verts[t[0]], verts[t[1]], verts[t[2]]) < 0.0) std::swap(t[1], t[2]);
  }
}

}  // namespace

TriMesh icosahedron(double radius) { return icosphere(0, radius); }

TriMesh icosphere(int subdivisions, double radius) {
  if (subdivisions < 0) throw RangeError("subdivision level must be nonnegative");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {
      {-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
      {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1},
  };
  std::vector<Triangle> f = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
  };
  for (auto& x : v) x.normalize();
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<VertexId, VertexId>, VertexId> mid;
    auto midpoint = [&](VertexId a, VertexId b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const auto id = static_cast<VertexId>(v.size());
      v.push_back((v[a] + v[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(f.size() * 4);
    for (const Triangle& t : f) {
      const VertexId ab = midpoint(t[0], t[1]);
      const VertexId bc = midpoint(t[1], t[2]);
      const VertexId ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (auto& x : v) x *= radius;
  return TriMesh(std::move(v), std::move(f));
}

TriMesh planar_grid(int nx, int ny, double width, double height) {
  if (nx < 1 || ny < 1) throw RangeError("grid needs at least one cell per side");
  std::vector<Eigen::Vector3d> v;
  std::vector<Triangle> f;
  auto id = [&](int i, int j) { return static_cast<VertexId>(j * (nx + 1) + i); };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) v.emplace_back(width * i / nx, height * j / ny, 0.0);
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh strip(int n, double length, double width) {
  if (n < 2) throw RangeError("strip needs at least two columns");
  return planar_grid(n - 1, 1, length, width);
}

TriMesh cylinder(double radius, double height, int around, int along) {
  if (around < 3 || along < 1) throw RangeError("cylinder resolution too small");
  std::vector<Eigen::Vector3d> v;
  std::vector<Triangle> f;
  auto id = [&](int i, int j) { return static_cast<VertexId>(j * around + (i % around)); };
  for (int j = 0; j <= along; ++j) {
    // Staggered rings give near-equilateral triangles.
    const double shift = (j % 2) * 0.5;
    for (int i = 0; i < around; ++i) {
      const double a = 2.0 * kPi * (i + shift) / around;
      v.emplace_back(radius * std::cos(a), radius * std::sin(a), height * j / along);
    }
  }
  for (int j = 0; j < along; ++j) {
    for (int i = 0; i < around; ++i) {
      if (j % 2 == 0) {
        f.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        f.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
      } else {
        f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      }
    }
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh disk(int rings, double radius) {
  std::vector<Eigen::Vector3d> v;
  std::vector<Triangle> f;
  disk_layout(rings, radius, v, f);
  return TriMesh(std::move(v), std::move(f));
}

TriMesh hemisphere(int rings, double radius) {
  std::vector<Eigen::Vector3d> v;
  std::vector<Triangle> f;
  disk_layout(rings, 1.0, v, f);
  for (auto& p : v) {
    const double r = std::hypot(p.x(), p.y());
    const double theta = std::atan2(p.y(), p.x());
    const double phi = r * kPi / 2.0;
    p = radius * Eigen::Vector3d(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi));
  }
  return TriMesh(std::move(v), std::move(f));
}

TriMesh displaced(const TriMesh& mesh, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f) {
  std::vector<Eigen::Vector3d> v;
  v.reserve(mesh.num_vertices());
  for (const auto& p : mesh.vertices()) v.push_back(f(p));
  return TriMesh(std::move(v), mesh.triangles());
}

TriMesh bumpy_sphere(int subdivisions, const std::vector<Bump>& bumps, double radius) {
  const TriMesh base = icosphere(subdivisions, 1.0);
  return displaced(base, [&](const Eigen::Vector3d& p) {
    double scale = 1.0;
    for (const Bump& b : bumps) {
      scale += b.amplitude * std::exp(-(p - b.center.normalized()).squaredNorm() / (2.0 * b.width * b.width));
    }
    return Eigen::Vector3d(radius * scale * p);
  });
}

TriMesh crown(int rings, double dome, const std::vector<Bump>& cusps) {
  std::vector<Eigen::Vector3d> v;
  std::vector<Triangle> f;
  disk_layout(rings, 1.0, v, f);
  for (auto& p : v) {
    double z = dome * (1.0 - p.head<2>().squaredNorm());
    for (const Bump& c : cusps) {
      z += c.amplitude * std::exp(-(p.head<2>() - c.center.head<2>()).squaredNorm() / (2.0 * c.width * c.width));
    }
    p.z() = z;
  }
  return TriMesh(std::move(v), std::move(f));
}

std::vector<Bump> molar_cusps() {
  return {
      {{0.38, 0.35, 0.0}, 0.30, 0.16},
      {{-0.40, 0.33, 0.0}, 0.24, 0.15},
      {{-0.36, -0.38, 0.0}, 0.20, 0.17},
      {{0.37, -0.36, 0.0}, 0.16, 0.14},
  };
}

}  // namespace gplmk::shapes
