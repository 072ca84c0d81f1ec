#include "gplmk/landmarks.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "gplmk/errors.hpp"
#include "gplmk/log.hpp"
#include "gplmk/random.hpp"

namespace gplmk {
namespace {

// Lowest index whose value is within `slack` of the maximum.
Eigen::Index tied_argmax(const Eigen::VectorXd& values, double slack) {
  const double best = values.maxCoeff();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] >= best - slack) return i;
  }
  return 0;
}

}  // namespace

std::string_view to_string(LandmarkMethod method) {
  switch (method) {
    case LandmarkMethod::GP: return "gp";
    case LandmarkMethod::GP_nW: return "gp_nw";
    case LandmarkMethod::GP_Euc: return "gp_euc";
    case LandmarkMethod::GFPS: return "gfps";
    case LandmarkMethod::Random: return "random";
    case LandmarkMethod::Observer: return "observer";
  }
  return "unknown";
}

LandmarkMethod landmark_method_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto m : {LandmarkMethod::GP, LandmarkMethod::GP_nW, LandmarkMethod::GP_Euc, LandmarkMethod::GFPS,
                 LandmarkMethod::Random, LandmarkMethod::Observer}) {
    if (lower == to_string(m)) return m;
  }
  throw ConfigError("unknown landmark method '" + std::string(name) + "'");
}

KernelVariant kernel_variant_for(LandmarkMethod method) {
  switch (method) {
    case LandmarkMethod::GP_nW: return KernelVariant::NonWeighted;
    case LandmarkMethod::GP_Euc: return KernelVariant::Euclidean;
    default: return KernelVariant::Reweighted;
  }
}

LandmarkSet LandmarkSet::prefix(std::size_t count) const {
  LandmarkSet out = *this;
  count = std::min(count, indices.size());
  out.indices.resize(count);
  out.scores.resize(std::min(count, scores.size()));
  return out;
}

GreedySelection greedy_select(const KernelMatrix& covariance, std::size_t count, const GreedyOptions& options) {
  const Eigen::Index n = covariance.size();
  if (covariance.entries.cols() != n) throw DimensionMismatchError("covariance must be square");
  if (count < 1 || static_cast<Eigen::Index>(count) > n) {
    std::ostringstream msg;
    msg << "requested " << count << " landmarks on " << n << " vertices";
    throw RangeError(msg.str());
  }
  const auto k_max = static_cast<Eigen::Index>(count);
  const Eigen::MatrixXd& k = covariance.entries;

  Eigen::VectorXd residual = k.diagonal();
  const double max_diag = residual.maxCoeff();
  if (!(max_diag > 0.0)) throw RankExhaustionError("covariance has no positive diagonal entry");
  const double slack = options.tie_tolerance * max_diag;
  const double floor = options.exhaustion_ratio * max_diag;
  const double negative_alarm = -1e-9 * max_diag;

  // Columns of the partial Cholesky factor: residual = diag(K) - sum_j factor(:, j)^2.
  Eigen::MatrixXd factor(n, k_max);
  GreedySelection out;
  out.landmarks.method = LandmarkMethod::GP;
  out.landmarks.indices.reserve(count);
  out.landmarks.scores.reserve(count);
  std::vector<std::uint8_t> selected(static_cast<std::size_t>(n), 0);

  for (Eigen::Index step = 0; step < k_max; ++step) {
    const Eigen::Index pick = tied_argmax(residual, slack);
    const double score = residual[pick];
    if (!(score >= floor) || score <= 0.0) {
      if (!options.allow_truncation) {
        std::ostringstream msg;
        msg << "kernel rank exhausted after " << step << " of " << count << " landmarks";
        throw RankExhaustionError(msg.str());
      }
      log_warn("kernel rank exhausted after " + std::to_string(step) + " landmarks; returning a shorter set");
      out.landmarks.truncated = true;
      break;
    }
    out.landmarks.indices.push_back(static_cast<VertexId>(pick));
    out.landmarks.scores.push_back(score);
    selected[static_cast<std::size_t>(pick)] = 1;

    Eigen::VectorXd col = k.col(pick);
    if (step > 0) col.noalias() -= factor.leftCols(step) * factor.row(pick).head(step).transpose();
    col /= std::sqrt(score);
    factor.col(step) = col;
    residual.array() -= col.array().square();

    bool alarmed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (selected[static_cast<std::size_t>(i)]) {
        residual[i] = 0.0;
      } else if (residual[i] < 0.0) {
        alarmed = alarmed || residual[i] < negative_alarm;
        residual[i] = 0.0;
      }
    }
    if (alarmed) log_warn("conditional variance fell below -1e-9 * max diagonal; clamped to zero");
  }
  out.residual_variance = std::move(residual);
  return out;
}

LandmarkSet gp_landmarks(const KernelMatrix& covariance, std::size_t count, const GreedyOptions& options) {
  return greedy_select(covariance, count, options).landmarks;
}

VertexField uncertainty_field(const KernelMatrix& covariance, std::span<const VertexId> landmarks) {
  const Eigen::MatrixXd& k = covariance.entries;
  const Eigen::Index n = covariance.size();
  Eigen::VectorXd sigma = k.diagonal();
  if (landmarks.empty()) return {std::move(sigma), FieldKind::Uncertainty};

  const auto m = static_cast<Eigen::Index>(landmarks.size());
  std::vector<VertexId> sorted(landmarks.begin(), landmarks.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw RangeError("landmark indices must be distinct");
  }
  for (VertexId v : landmarks) {
    if (v < 0 || v >= n) throw RangeError("landmark index out of range");
  }

  Eigen::MatrixXd sub(m, m);
  Eigen::MatrixXd cross(m, n);
  for (Eigen::Index a = 0; a < m; ++a) {
    cross.row(a) = k.row(landmarks[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < m; ++b) {
      sub(a, b) = k(landmarks[static_cast<std::size_t>(a)], landmarks[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  const double max_diag = k.diagonal().maxCoeff();
  if (llt.info() != Eigen::Success) throw SingularSubmatrixError("landmark covariance is not positive definite");
  const Eigen::VectorXd pivots = Eigen::MatrixXd(llt.matrixL()).diagonal();
  if (pivots.array().square().minCoeff() < 1e-13 * max_diag) {
    throw SingularSubmatrixError("landmark covariance is numerically singular");
  }
  const Eigen::MatrixXd solved = llt.matrixL().solve(cross);
  sigma -= solved.colwise().squaredNorm().transpose();

  const double alarm = -1e-9 * max_diag;
  bool alarmed = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sigma[i] < 0.0) {
      alarmed = alarmed || sigma[i] < alarm;
      sigma[i] = 0.0;
    }
  }
  if (alarmed) log_warn("uncertainty below -1e-9 * max diagonal; clamped to zero");
  return {std::move(sigma), FieldKind::Uncertainty};
}

LandmarkSet gfps_landmarks(const TriMesh& mesh, std::size_t count, VertexId seed_vertex,
                           const GeodesicOptions& geodesic) {
  const std::size_t nv = mesh.num_vertices();
  if (count < 1 || count > nv) throw RangeError("GFPS landmark count out of range");
  if (seed_vertex < 0 || static_cast<std::size_t>(seed_vertex) >= nv) throw RangeError("GFPS seed out of range");

  LandmarkSet out;
  out.method = LandmarkMethod::GFPS;
  out.indices.push_back(seed_vertex);
  out.scores.push_back(0.0);
  const VertexId first[] = {seed_vertex};
  Eigen::VectorXd nearest = geodesic_distances(mesh, first, geodesic);
  while (out.indices.size() < count) {
    const double slack = 1e-12 * nearest.maxCoeff();
    const Eigen::Index pick = tied_argmax(nearest, slack);
    out.indices.push_back(static_cast<VertexId>(pick));
    out.scores.push_back(nearest[pick]);
    const VertexId src[] = {static_cast<VertexId>(pick)};
    nearest = nearest.cwiseMin(geodesic_distances(mesh, src, geodesic));
    nearest[pick] = 0.0;
  }
  return out;
}

LandmarkSet random_landmarks(std::size_t num_vertices, std::size_t count, std::uint64_t seed) {
  if (count < 1 || count > num_vertices) throw RangeError("random landmark count out of range");
  std::vector<VertexId> pool(num_vertices);
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(num_vertices - i));
    std::swap(pool[i], pool[j]);
  }
  LandmarkSet out;
  out.method = LandmarkMethod::Random;
  out.params = seed;
  out.indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  out.scores.assign(count, 0.0);
  return out;
}

double greedy_determinant_ratio(const KernelMatrix& covariance, std::size_t n) {
  const Eigen::Index size = covariance.size();
  if (n < 1 || static_cast<Eigen::Index>(n) > size) throw RangeError("subset size out of range");
  // C(size, n) with an early exit once it exceeds the guard.
  double subsets = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    subsets = subsets * static_cast<double>(size - static_cast<Eigen::Index>(i)) / static_cast<double>(i + 1);
  }
  if (subsets > 1e6) throw ComplexityGuardError("exhaustive subset search exceeds 10^6 subsets");

  auto subset_det = [&](std::span<const VertexId> idx) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        sub(a, b) = covariance.entries(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
      }
    }
    return sub.fullPivLu().determinant();
  };

  const LandmarkSet greedy = gp_landmarks(covariance, n);
  const double greedy_det = subset_det(greedy.indices);

  double best = -std::numeric_limits<double>::infinity();
  std::vector<VertexId> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    best = std::max(best, subset_det(idx));
    // Next combination in lexicographic order.
    std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(n) - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == static_cast<VertexId>(size) - static_cast<VertexId>(n) +
                                                                   static_cast<VertexId>(pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (auto q = static_cast<std::size_t>(pos) + 1; q < n; ++q) idx[q] = idx[q - 1] + 1;
  }
  if (!(best > 0.0)) return 1.0;
  return greedy_det / best;
}

}  // namespace gplmk
