#include "gplmk/registration/parametrization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include "gplmk/errors.hpp"
#include "gplmk/log.hpp"

namespace gplmk {
namespace {

using Coef = Eigen::Matrix<double, 3, 2>;

Coef corner_weights(const Eigen::Matrix2d& edges) {
  const Eigen::Matrix2d inv = edges.inverse();
  Coef c;
  c.row(0) = -(inv.row(0) + inv.row(1));
  c.row(1) = inv.row(0);
  c.row(2) = inv.row(1);
  return c;
}

Eigen::Matrix2d jacobian(const Coef& c, const Triangle& t, const Eigen::MatrixX2d& uv) {
  Eigen::Matrix<double, 2, 3> q;
  for (int k = 0; k < 3; ++k) q.col(k) = uv.row(t[k]).transpose();
  return q * c;
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Triangle& t, const Eigen::MatrixX2d& uv) {
  const Eigen::Vector2d a = uv.row(t[0]).transpose();
  return 0.5 * cross2(uv.row(t[1]).transpose() - a, uv.row(t[2]).transpose() - a);
}

double penalty(const Eigen::MatrixX2d& uv, std::span<const PositionalConstraint> constraints, double stiffness) {
  double sum = 0.0;
  for (const auto& c : constraints) sum += (uv.row(c.vertex).transpose() - c.target).squaredNorm();
  return stiffness * sum;
}

// Largest step along `dir` in (0, 1] keeping every triangle's signed area
// above zero, scaled back by 0.8 from the first root.
double flip_free_step(const TriMesh& mesh, const Eigen::MatrixX2d& uv, const Eigen::MatrixX2d& dir) {
  double step = 1.0;
  for (const Triangle& t : mesh.triangles()) {
    const Eigen::Vector2d e1 = (uv.row(t[1]) - uv.row(t[0])).transpose();
    const Eigen::Vector2d e2 = (uv.row(t[2]) - uv.row(t[0])).transpose();
    const Eigen::Vector2d d1 = (dir.row(t[1]) - dir.row(t[0])).transpose();
    const Eigen::Vector2d d2 = (dir.row(t[2]) - dir.row(t[0])).transpose();
    const double a = cross2(d1, d2);
    const double b = cross2(e1, d2) + cross2(d1, e2);
    const double c = cross2(e1, e2);
    double root = std::numeric_limits<double>::infinity();
    if (std::abs(a) < 1e-300) {
      if (b < 0.0) root = -c / b;
    } else {
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // Numerically stable pair of roots.
        const double qv = -0.5 * (b + std::copysign(sq, b));
        for (double r : {qv / a, qv != 0.0 ? c / qv : std::numeric_limits<double>::infinity()}) {
          if (r > 0.0) root = std::min(root, r);
        }
      }
    }
    if (root < std::numeric_limits<double>::infinity()) step = std::min(step, 0.8 * root);
  }
  return step;
}

struct DescentResult {
  Eigen::MatrixX2d uv;
  double energy = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

// Local-global (scaled-Jacobian) iterations on the symmetric energy plus an
// optional quadratic positional penalty.
DescentResult descend(const TriMesh& mesh, const RestFrames& rest, Eigen::MatrixX2d uv,
                      std::span<const PositionalConstraint> constraints, double stiffness,
                      const ParamOptions& options) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  const auto nf = mesh.num_triangles();
  const double total_area = rest.areas.sum();
  const double prox = 1e-8 * total_area / static_cast<double>(n);

  auto merit = [&](const Eigen::MatrixX2d& x) {
    return isometric_energy(rest, mesh, x) + penalty(x, constraints, stiffness);
  };

  DescentResult out;
  double current = merit(uv);
  if (!std::isfinite(current)) throw FlipRecoveryError("descent started from an inverted embedding");
  out.history.push_back(current);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool analysed = false;
  std::vector<Eigen::Triplet<double>> triplets;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Local step: closest rotation and SVD-based weights per triangle.
    triplets.clear();
    triplets.reserve(nf * 24 + constraints.size() * 2);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(4 * static_cast<Eigen::Index>(nf) + 2 * static_cast<Eigen::Index>(constraints.size()));
    for (std::size_t f = 0; f < nf; ++f) {
      const Triangle& t = mesh.triangle(f);
      const Eigen::Matrix2d j = jacobian(rest.coef[f], t, uv);
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::Matrix2d u = svd.matrixU();
      Eigen::Matrix2d v = svd.matrixV();
      Eigen::Vector2d s = svd.singularValues();
      if (u.determinant() * v.determinant() < 0.0) {
        u.col(1) *= -1.0;
        s[1] *= -1.0;
      }
      const Eigen::Matrix2d rot = u * v.transpose();
      Eigen::Vector2d w;
      for (int k = 0; k < 2; ++k) {
        const double sk = s[k];
        const double ratio = std::abs(sk - 1.0) < 1e-8 ? 4.0 : (sk - 1.0 / (sk * sk * sk)) / (sk - 1.0);
        w[k] = std::sqrt(std::max(ratio, 1e-12));
      }
      const Eigen::Matrix2d weight = u * w.asDiagonal() * u.transpose();
      const Eigen::Matrix2d target = weight * rot;
      const double sa = std::sqrt(rest.areas[static_cast<Eigen::Index>(f)]);
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          const auto row = static_cast<int>(4 * f + 2 * r + c);
          for (int a = 0; a < 2; ++a) {
            for (int k = 0; k < 3; ++k) {
              const double value = sa * weight(r, a) * rest.coef[f](k, c);
              triplets.emplace_back(row, t[k] + a * n, value);
            }
          }
          rhs[row] = sa * target(r, c);
        }
      }
    }
    const double root_stiff = std::sqrt(stiffness);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      for (int a = 0; a < 2; ++a) {
        const auto row = static_cast<int>(4 * nf + 2 * i + a);
        triplets.emplace_back(row, constraints[i].vertex + a * n, root_stiff);
        rhs[row] = root_stiff * constraints[i].target[a];
      }
    }
    Eigen::SparseMatrix<double> a(rhs.size(), 2 * n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseMatrix<double> h = a.transpose() * a;
    Eigen::VectorXd x(2 * n);
    x << uv.col(0), uv.col(1);
    Eigen::VectorXd b = a.transpose() * rhs + prox * x;
    for (Eigen::Index i = 0; i < 2 * n; ++i) h.coeffRef(i, i) += prox;
    if (!analysed) {
      solver.analyzePattern(h);
      analysed = true;
    }
    solver.factorize(h);
    if (solver.info() != Eigen::Success) throw ConvergenceError("global step factorisation failed");
    const Eigen::VectorXd next = solver.solve(b);

    Eigen::MatrixX2d dir(n, 2);
    dir.col(0) = next.head(n) - uv.col(0);
    dir.col(1) = next.tail(n) - uv.col(1);

    // Flip-free backtracking.
    double step = flip_free_step(mesh, uv, dir);
    double trial_value = std::numeric_limits<double>::infinity();
    Eigen::MatrixX2d trial;
    for (int halving = 0; halving < 40; ++halving) {
      trial = uv + step * dir;
      trial_value = merit(trial);
      if (trial_value < current) break;
      step *= 0.5;
    }
    out.iterations = iter + 1;
    if (!(trial_value < current)) break;
    const double decrease = (current - trial_value) / std::max(current, 1e-300);
    uv = std::move(trial);
    current = trial_value;
    out.history.push_back(current);
    if (decrease < options.tolerance) break;
  }
  out.uv = std::move(uv);
  out.energy = current;
  return out;
}

}  // namespace

RestFrames rest_frames(const TriMesh& mesh) {
  RestFrames rest;
  rest.coef.reserve(mesh.num_triangles());
  rest.areas.resize(static_cast<Eigen::Index>(mesh.num_triangles()));
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Triangle& t = mesh.triangle(f);
    const Eigen::Vector3d e1 = mesh.vertex(t[1]) - mesh.vertex(t[0]);
    const Eigen::Vector3d e2 = mesh.vertex(t[2]) - mesh.vertex(t[0]);
    const double len = e1.norm();
    const Eigen::Vector3d x_axis = e1 / len;
    Eigen::Matrix2d edges;
    edges << len, e2.dot(x_axis), 0.0, e2.cross(x_axis).norm();
    rest.coef.push_back(corner_weights(edges));
    rest.areas[static_cast<Eigen::Index>(f)] = 0.5 * edges.determinant();
  }
  return rest;
}

RestFrames rest_frames(const TriMesh& mesh, const Eigen::MatrixX2d& planar_rest) {
  if (planar_rest.rows() != static_cast<Eigen::Index>(mesh.num_vertices())) {
    throw DimensionMismatchError("planar rest shape does not match mesh");
  }
  RestFrames rest;
  rest.coef.reserve(mesh.num_triangles());
  rest.areas.resize(static_cast<Eigen::Index>(mesh.num_triangles()));
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Triangle& t = mesh.triangle(f);
    Eigen::Matrix2d edges;
    edges.col(0) = (planar_rest.row(t[1]) - planar_rest.row(t[0])).transpose();
    edges.col(1) = (planar_rest.row(t[2]) - planar_rest.row(t[0])).transpose();
    const double det = edges.determinant();
    if (!(det > 0.0)) throw FlipRecoveryError("planar rest shape has an inverted triangle");
    rest.coef.push_back(corner_weights(edges));
    rest.areas[static_cast<Eigen::Index>(f)] = 0.5 * det;
  }
  return rest;
}

double isometric_energy(const RestFrames& rest, const TriMesh& mesh, const Eigen::MatrixX2d& uv) {
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.num_triangles(); ++f) {
    const Eigen::Matrix2d j = jacobian(rest.coef[f], mesh.triangle(f), uv);
    const double det = j.determinant();
    if (!(det > 0.0)) return std::numeric_limits<double>::infinity();
    const double fro = j.squaredNorm();
    sum += rest.areas[static_cast<Eigen::Index>(f)] * (fro + fro / (det * det));
  }
  return 0.5 * sum;
}

std::size_t count_flipped(const TriMesh& mesh, const Eigen::MatrixX2d& uv) {
  std::size_t flipped = 0;
  for (const Triangle& t : mesh.triangles()) {
    if (!(signed_area(t, uv) > 0.0)) ++flipped;
  }
  return flipped;
}

PlanarParam tutte_embedding(const TriMesh& mesh) {
  if (!mesh.is_disk_type()) throw NotDiskTypeError("parametrization needs a disk-type mesh");
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<VertexId> loop = mesh.boundary_loops().front();
  std::rotate(loop.begin(), std::min_element(loop.begin(), loop.end()), loop.end());

  std::vector<double> arc(loop.size() + 1, 0.0);
  for (std::size_t k = 0; k < loop.size(); ++k) {
    arc[k + 1] = arc[k] + (mesh.vertex(loop[(k + 1) % loop.size()]) - mesh.vertex(loop[k])).norm();
  }
  const double radius = std::sqrt(mesh.total_area() / std::numbers::pi);

  PlanarParam param;
  param.boundary = loop;
  param.uv = Eigen::MatrixX2d::Zero(n, 2);
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  std::vector<std::uint8_t> on_boundary(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const double theta = 2.0 * std::numbers::pi * arc[k] / arc.back();
    param.uv.row(loop[k]) << radius * std::cos(theta), radius * std::sin(theta);
    on_boundary[static_cast<std::size_t>(loop[k])] = 1;
  }
  Eigen::Index interior = 0;
  for (Eigen::Index v = 0; v < n; ++v) {
    if (!on_boundary[static_cast<std::size_t>(v)]) slot[static_cast<std::size_t>(v)] = interior++;
  }
  if (interior > 0) {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(interior, 2);
    for (Eigen::Index v = 0; v < n; ++v) {
      const Eigen::Index row = slot[static_cast<std::size_t>(v)];
      if (row < 0) continue;
      const auto ring = mesh.neighbors(static_cast<VertexId>(v));
      triplets.emplace_back(row, row, static_cast<double>(ring.size()));
      for (VertexId u : ring) {
        const Eigen::Index col = slot[static_cast<std::size_t>(u)];
        if (col >= 0) {
          triplets.emplace_back(row, col, -1.0);
        } else {
          rhs.row(row) += param.uv.row(u);
        }
      }
    }
    Eigen::SparseMatrix<double> lap(interior, interior);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
    if (solver.info() != Eigen::Success) throw FlipRecoveryError("Tutte system could not be factorised");
    const Eigen::MatrixX2d inner = solver.solve(rhs);
    for (Eigen::Index v = 0; v < n; ++v) {
      const Eigen::Index row = slot[static_cast<std::size_t>(v)];
      if (row >= 0) param.uv.row(v) = inner.row(row);
    }
  }
  double total = 0.0;
  for (const Triangle& t : mesh.triangles()) total += signed_area(t, param.uv);
  if (total < 0.0) param.uv.col(1) *= -1.0;
  if (count_flipped(mesh, param.uv) != 0) throw FlipRecoveryError("Tutte embedding produced inverted triangles");
  const RestFrames rest = rest_frames(mesh);
  param.initial_energy = param.energy = isometric_energy(rest, mesh, param.uv);
  param.energy_history = {param.energy};
  return param;
}

PlanarParam aiap_parametrize(const TriMesh& mesh, const ParamOptions& options) {
  PlanarParam param = tutte_embedding(mesh);
  const RestFrames rest = rest_frames(mesh);
  DescentResult run = descend(mesh, rest, param.uv, {}, 0.0, options);
  param.uv = std::move(run.uv);
  param.energy = run.energy;
  param.iterations = run.iterations;
  param.energy_history = std::move(run.history);
  if (count_flipped(mesh, param.uv) != 0) throw FlipRecoveryError("parametrization inverted a triangle");
  return param;
}

ConstrainedResult constrained_descent(const TriMesh& mesh, const RestFrames& rest, const Eigen::MatrixX2d& start,
                                      std::span<const PositionalConstraint> constraints,
                                      const ParamOptions& options) {
  for (const auto& c : constraints) {
    if (c.vertex < 0 || static_cast<std::size_t>(c.vertex) >= mesh.num_vertices()) {
      throw RangeError("constraint vertex out of range");
    }
  }
  // Energy and penalty are both in squared-length units, so a fixed large
  // weight is stiff regardless of scale.
  const double stiffness = 1e5;
  DescentResult run = descend(mesh, rest, start, constraints, stiffness, options);
  ConstrainedResult out;
  out.uv = std::move(run.uv);
  out.iterations = run.iterations;
  double worst = 0.0;
  for (const auto& c : constraints) {
    worst = std::max(worst, (out.uv.row(c.vertex).transpose() - c.target).norm());
    out.uv.row(c.vertex) = c.target.transpose();
  }
  if (count_flipped(mesh, out.uv) != 0) {
    throw ConstraintInfeasibleError("placing the constraints exactly inverts a triangle (residual before placement " +
                                    std::to_string(worst) + ")");
  }
  out.energy = isometric_energy(rest, mesh, out.uv);
  log_debug("constrained descent: " + std::to_string(out.iterations) + " iterations, largest pre-placement residual " +
            std::to_string(worst));
  return out;
}

}  // namespace gplmk
