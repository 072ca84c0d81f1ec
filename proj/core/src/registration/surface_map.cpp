#include "gplmk/registration/surface_map.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "gplmk/errors.hpp"

namespace gplmk {
namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Vector2d closest_on_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                   double& t) {
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  t = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return a + t * d;
}

}  // namespace

Eigen::Vector3d SurfacePoint::position(const TriMesh& mesh) const {
  const Triangle& t = mesh.triangle(static_cast<std::size_t>(triangle));
  return bary[0] * mesh.vertex(t[0]) + bary[1] * mesh.vertex(t[1]) + bary[2] * mesh.vertex(t[2]);
}

Eigen::MatrixX3d SurfaceMap::image_points(const TriMesh& target) const {
  Eigen::MatrixX3d out(static_cast<Eigen::Index>(images.size()), 3);
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = images[i].position(target).transpose();
  }
  return out;
}

PlanarLocator::PlanarLocator(const TriMesh& mesh, const Eigen::MatrixX2d& uv) : mesh_(mesh), uv_(uv) {
  lo_ = uv.colwise().minCoeff().transpose();
  const Eigen::Vector2d hi = uv.colwise().maxCoeff().transpose();
  const Eigen::Vector2d span = (hi - lo_).cwiseMax(1e-300);
  const double per_side = std::max(1.0, std::sqrt(static_cast<double>(mesh.num_triangles())));
  cell_ = std::max(span.x(), span.y()) / per_side;
  nx_ = std::max(1, static_cast<int>(std::ceil(span.x() / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(span.y() / cell_)));
  cells_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
  auto clamp_x = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - lo_.x()) / cell_)), 0, nx_ - 1); };
  auto clamp_y = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - lo_.y()) / cell_)), 0, ny_ - 1); };
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Triangle& t = mesh.triangle(f);
    double x0 = uv(t[0], 0), x1 = x0, y0 = uv(t[0], 1), y1 = y0;
    for (int k = 1; k < 3; ++k) {
      x0 = std::min(x0, uv(t[k], 0));
      x1 = std::max(x1, uv(t[k], 0));
      y0 = std::min(y0, uv(t[k], 1));
      y1 = std::max(y1, uv(t[k], 1));
    }
    for (int j = clamp_y(y0); j <= clamp_y(y1); ++j) {
      for (int i = clamp_x(x0); i <= clamp_x(x1); ++i) {
        cells_[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<std::int32_t>(f));
      }
    }
  }
}

bool PlanarLocator::barycentric(std::size_t f, const Eigen::Vector2d& p, Eigen::Vector3d& bary) const {
  const Triangle& t = mesh_.triangle(f);
  const Eigen::Vector2d a = uv_.row(t[0]).transpose();
  const Eigen::Vector2d b = uv_.row(t[1]).transpose();
  const Eigen::Vector2d c = uv_.row(t[2]).transpose();
  const double area = cross2(b - a, c - a);
  if (area == 0.0) return false;
  bary << cross2(b - p, c - p) / area, cross2(c - p, a - p) / area, 0.0;
  bary[2] = 1.0 - bary[0] - bary[1];
  return true;
}

SurfacePoint PlanarLocator::nearest(const Eigen::Vector2d& p) const {
  SurfacePoint best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh_.num_triangles(); ++f) {
    const Triangle& t = mesh_.triangle(f);
    for (int e = 0; e < 3; ++e) {
      const Eigen::Vector2d a = uv_.row(t[e]).transpose();
      const Eigen::Vector2d b = uv_.row(t[(e + 1) % 3]).transpose();
      double s = 0.0;
      const double d = (closest_on_segment(p, a, b, s) - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best.triangle = static_cast<std::int32_t>(f);
        best.bary = Eigen::Vector3d::Zero();
        best.bary[e] = 1.0 - s;
        best.bary[(e + 1) % 3] = s;
      }
    }
  }
  return best;
}

SurfacePoint PlanarLocator::locate(const Eigen::Vector2d& p, bool& projected) const {
  projected = false;
  const int i = static_cast<int>(std::floor((p.x() - lo_.x()) / cell_));
  const int j = static_cast<int>(std::floor((p.y() - lo_.y()) / cell_));
  SurfacePoint best;
  double best_min = -std::numeric_limits<double>::infinity();
  // The point's cell plus its neighbours guard against round-off at cell edges.
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      const int ci = i + di;
      const int cj = j + dj;
      if (ci < 0 || cj < 0 || ci >= nx_ || cj >= ny_) continue;
      for (std::int32_t f : cells_[static_cast<std::size_t>(cj * nx_ + ci)]) {
        Eigen::Vector3d bary;
        if (!barycentric(static_cast<std::size_t>(f), p, bary)) continue;
        const double m = bary.minCoeff();
        if (m > best_min) {
          best_min = m;
          best.triangle = f;
          best.bary = bary;
        }
      }
    }
  }
  if (best.triangle >= 0 && best_min >= -1e-10) {
    best.bary = best.bary.cwiseMax(0.0);
    best.bary /= best.bary.sum();
    return best;
  }
  projected = true;
  return nearest(p);
}

SurfaceMap interpolate_map(const TriMesh& mesh1, const PlanarParam& p1, const PlanarParam& p2,
                           const CorrespondenceSet& corr, const TriMesh& mesh2, const ParamOptions& options) {
  if (p1.uv.rows() != static_cast<Eigen::Index>(mesh1.num_vertices()) ||
      p2.uv.rows() != static_cast<Eigen::Index>(mesh2.num_vertices())) {
    throw DimensionMismatchError("parametrization does not match its mesh");
  }
  if (corr.size() < 3) throw DegenerateConfigurationError("map interpolation needs at least 3 correspondences");
  std::vector<Eigen::Vector2d> src;
  std::vector<Eigen::Vector2d> dst;
  std::vector<PositionalConstraint> constraints;
  for (const auto& pair : corr.pairs) {
    if (pair.source_vertex < 0 || pair.target_vertex < 0) {
      throw RangeError("correspondence lacks vertex ids");
    }
    src.emplace_back(p1.uv.row(pair.source_vertex).transpose());
    dst.emplace_back(p2.uv.row(pair.target_vertex).transpose());
    constraints.push_back({pair.source_vertex, dst.back()});
  }
  // Non-collinearity of the source constraint points.
  {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : src) mean += p;
    mean /= static_cast<double>(src.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : src) cov += (p - mean) * (p - mean).transpose();
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov).eigenvalues();
    if (!(ev[0] > 1e-12 * ev[1])) throw DegenerateConfigurationError("correspondence points are collinear");
  }

  const PlanarTransform start_map = fit_similarity(src, dst);
  Eigen::MatrixX2d start(p1.uv.rows(), 2);
  for (Eigen::Index v = 0; v < start.rows(); ++v) start.row(v) = start_map(p1.uv.row(v).transpose()).transpose();
  const RestFrames rest = rest_frames(mesh1, p1.uv);
  const ConstrainedResult planar = constrained_descent(mesh1, rest, start, constraints, options);

  SurfaceMap map;
  map.planar = planar.uv;
  map.energy = planar.energy;
  const std::size_t n = mesh1.num_vertices();
  map.images.resize(n);
  map.constrained.assign(n, 0);
  map.projected.assign(n, 0);
  const PlanarLocator locator(mesh2, p2.uv);
  for (std::size_t v = 0; v < n; ++v) {
    bool projected = false;
    map.images[v] = locator.locate(planar.uv.row(static_cast<Eigen::Index>(v)).transpose(), projected);
    map.projected[v] = projected ? 1 : 0;
  }
  for (const auto& pair : corr.pairs) {
    // Pinned vertices land exactly on their partner vertex.
    const auto faces = mesh2.incident_triangles(pair.target_vertex);
    SurfacePoint exact;
    exact.triangle = faces.front();
    const Triangle& t = mesh2.triangle(static_cast<std::size_t>(exact.triangle));
    for (int k = 0; k < 3; ++k) exact.bary[k] = t[k] == pair.target_vertex ? 1.0 : 0.0;
    map.images[static_cast<std::size_t>(pair.source_vertex)] = exact;
    map.constrained[static_cast<std::size_t>(pair.source_vertex)] = 1;
    map.projected[static_cast<std::size_t>(pair.source_vertex)] = 0;
  }
  return map;
}

void write_map_csv(const SurfaceMap& map, std::ostream& out) {
  out << "vertex,triangle,b0,b1,b2\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t v = 0; v < map.images.size(); ++v) {
    const auto& s = map.images[v];
    out << v << ',' << s.triangle << ',' << s.bary[0] << ',' << s.bary[1] << ',' << s.bary[2] << '\n';
  }
}

void write_correspondences_csv(const CorrespondenceSet& corr, std::ostream& out) {
  out << "index1,index2\n";
  for (const auto& p : corr.pairs) out << p.source_vertex << ',' << p.target_vertex << '\n';
}

}  // namespace gplmk
