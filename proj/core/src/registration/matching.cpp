#include "gplmk/registration/matching.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "gplmk/errors.hpp"
#include "gplmk/random.hpp"

namespace gplmk {
namespace {

using Complex = std::complex<double>;

Complex as_complex(const Eigen::Vector2d& p) { return {p.x(), p.y()}; }

PlanarTransform from_complex(Complex scale, Complex shift) {
  PlanarTransform t;
  t.linear << scale.real(), -scale.imag(), scale.imag(), scale.real();
  t.offset << shift.real(), shift.imag();
  return t;
}


struct Score {
  std::vector<std::size_t> accepted;  // indices into the flattened candidate list
  std::vector<double> residuals;
  double residual_sum = 0.0;

  std::size_t count() const { return accepted.size(); }
  bool better_than(const Score& other) const {
    if (count() != other.count()) return count() > other.count();
    return residual_sum < other.residual_sum;
  }
};

class Scorer {
 public:
  Scorer(const std::vector<Candidate>& flat, std::span<const Eigen::Vector2d> src, std::span<const Eigen::Vector2d> dst,
         double tolerance)
      : flat_(flat), src_(src), dst_(dst), tolerance_(tolerance), order_(flat.size()), residual_(flat.size()) {}

  Score operator()(const PlanarTransform& t, std::size_t sources, std::size_t targets) {
    for (std::size_t c = 0; c < flat_.size(); ++c) {
      residual_[c] = (t(src_[flat_[c].source]) - dst_[flat_[c].target]).norm();
    }
    order_.clear();
    for (std::size_t c = 0; c < flat_.size(); ++c) {
      if (residual_[c] <= tolerance_) order_.push_back(c);
    }
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return residual_[a] < residual_[b]; });
    used_source_.assign(sources, 0);
    used_target_.assign(targets, 0);
    Score s;
    for (std::size_t c : order_) {
      auto& us = used_source_[flat_[c].source];
      auto& ut = used_target_[flat_[c].target];
      if (us || ut) continue;
      us = ut = 1;
      s.accepted.push_back(c);
      s.residuals.push_back(residual_[c]);
      s.residual_sum += residual_[c];
    }
    return s;
  }

 private:
  const std::vector<Candidate>& flat_;
  std::span<const Eigen::Vector2d> src_;
  std::span<const Eigen::Vector2d> dst_;
  double tolerance_;
  std::vector<std::size_t> order_;
  std::vector<double> residual_;
  std::vector<std::uint8_t> used_source_;
  std::vector<std::uint8_t> used_target_;
};

// Least-squares affine map, with the linear part's singular values pulled
// together (about their geometric mean) until the distortion is <= kbound.
PlanarTransform fit_bounded_affine(std::span<const Eigen::Vector2d> p, std::span<const Eigen::Vector2d> q,
                                   double kbound, bool& ok) {
  ok = false;
  const auto n = p.size();
  Eigen::Vector2d pc = Eigen::Vector2d::Zero();
  Eigen::Vector2d qc = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    pc += p[i];
    qc += q[i];
  }
  pc /= static_cast<double>(n);
  qc /= static_cast<double>(n);
  Eigen::Matrix2d spp = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d sqp = Eigen::Matrix2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    spp += (p[i] - pc) * (p[i] - pc).transpose();
    sqp += (q[i] - qc) * (p[i] - pc).transpose();
  }
  PlanarTransform t;
  if (std::abs(spp.determinant()) < 1e-14 * std::max(1e-300, spp.squaredNorm())) return t;
  Eigen::Matrix2d a = sqp * spp.inverse();
  if (!(a.determinant() > 0.0)) return t;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector2d s = svd.singularValues();
  if (s[0] > kbound * s[1]) {
    const double g = std::sqrt(s[0] * s[1]);
    s << g * std::sqrt(kbound), g / std::sqrt(kbound);
    a = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  }
  t.linear = a;
  t.offset = qc - a * pc;
  ok = true;
  return t;
}

}  // namespace

std::vector<Candidate> CandidateSet::flattened() const {
  std::vector<Candidate> flat;
  for (const auto& list : per_source) flat.insert(flat.end(), list.begin(), list.end());
  return flat;
}

CandidateSet candidate_matches(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, std::size_t T) {
  if (source.cols() != target.cols()) throw DimensionMismatchError("descriptor dimensions differ");
  if (T < 1 || static_cast<Eigen::Index>(T) > target.rows()) {
    throw RangeError("candidate count T must lie in [1, number of target landmarks]");
  }
  CandidateSet out;
  out.per_landmark = T;
  out.per_source.resize(static_cast<std::size_t>(source.rows()));
  std::vector<Candidate> all(static_cast<std::size_t>(target.rows()));
  for (Eigen::Index i = 0; i < source.rows(); ++i) {
    for (Eigen::Index j = 0; j < target.rows(); ++j) {
      all[static_cast<std::size_t>(j)] = {static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                          (source.row(i) - target.row(j)).norm()};
    }
    std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
    out.per_source[static_cast<std::size_t>(i)].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(T));
  }
  return out;
}

CandidateSet candidate_matches(const LandmarkSet& lms1, const LandmarkSet& lms2, const WksDescriptor& sig1,
                               const WksDescriptor& sig2, std::size_t T) {
  return candidate_matches(sig1.rows(lms1.indices), sig2.rows(lms2.indices), T);
}

double PlanarTransform::conformal_distortion() const {
  const Eigen::Vector2d s = Eigen::JacobiSVD<Eigen::Matrix2d>(linear).singularValues();
  return s[1] > 0.0 ? s[0] / s[1] : std::numeric_limits<double>::infinity();
}

PlanarTransform fit_similarity(std::span<const Eigen::Vector2d> p, std::span<const Eigen::Vector2d> q) {
  if (p.size() != q.size() || p.size() < 2) throw RangeError("similarity fit needs at least two point pairs");
  Complex pc = 0.0;
  Complex qc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    pc += as_complex(p[i]);
    qc += as_complex(q[i]);
  }
  pc /= static_cast<double>(p.size());
  qc /= static_cast<double>(p.size());
  Complex num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Complex a = as_complex(p[i]) - pc;
    num += std::conj(a) * (as_complex(q[i]) - qc);
    den += std::norm(a);
  }
  if (!(den > 0.0)) throw DegenerateConfigurationError("similarity fit on coincident points");
  const Complex scale = num / den;
  return from_complex(scale, qc - scale * pc);
}

CorrespondenceSet bd_filter(const CandidateSet& candidates, std::span<const Eigen::Vector2d> source_points,
                            std::span<const Eigen::Vector2d> target_points, double domain_diagonal,
                            const FilterOptions& options) {
  if (!(options.kbound >= 1.0)) throw RangeError("distortion bound must be at least 1");
  if (!(domain_diagonal > 0.0)) throw RangeError("domain diagonal must be positive");
  const std::vector<Candidate> flat = candidates.flattened();
  if (flat.empty()) throw NoConsensusError("no candidate matches");
  for (const Candidate& c : flat) {
    if (c.source >= source_points.size() || c.target >= target_points.size()) {
      throw RangeError("candidate refers to a missing landmark position");
    }
  }
  const double tolerance = options.inlier_tolerance * domain_diagonal;
  const double tiny = 1e-12 * domain_diagonal;
  Scorer score(flat, source_points, target_points, tolerance);
  const std::size_t ns = source_points.size();
  const std::size_t nt = target_points.size();

  Score best;
  PlanarTransform best_t;
  std::size_t hypotheses = 0;
  auto consider = [&](const PlanarTransform& t) {
    ++hypotheses;
    Score s = score(t, ns, nt);
    if (s.better_than(best)) {
      best = std::move(s);
      best_t = t;
    }
  };

  const std::size_t n = flat.size();
  auto compatible = [&](std::size_t a, std::size_t b) {
    return flat[a].source != flat[b].source && flat[a].target != flat[b].target;
  };

  // Two-pair similarities.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!compatible(a, b)) continue;
      const Complex p1 = as_complex(source_points[flat[a].source]);
      const Complex p2 = as_complex(source_points[flat[b].source]);
      const Complex q1 = as_complex(target_points[flat[a].target]);
      const Complex q2 = as_complex(target_points[flat[b].target]);
      if (std::abs(p2 - p1) <= tiny || std::abs(q2 - q1) <= tiny) continue;
      const Complex s = (q2 - q1) / (p2 - p1);
      consider(from_complex(s, q1 - s * p1));
    }
  }

  // Three-pair affine maps within the distortion bound.
  if (options.kbound > 1.0 + 1e-12 && n >= 3) {
    auto try_triple = [&](std::size_t a, std::size_t b, std::size_t c) {
      if (!compatible(a, b) || !compatible(a, c) || !compatible(b, c)) return;
      const Eigen::Vector2d& p0 = source_points[flat[a].source];
      const Eigen::Vector2d& q0 = target_points[flat[a].target];
      Eigen::Matrix2d dp;
      Eigen::Matrix2d dq;
      dp << source_points[flat[b].source] - p0, source_points[flat[c].source] - p0;
      dq << target_points[flat[b].target] - q0, target_points[flat[c].target] - q0;
      if (std::abs(dp.determinant()) <= tiny * domain_diagonal) return;
      PlanarTransform t;
      t.linear = dq * dp.inverse();
      if (!(t.linear.determinant() > 0.0)) return;
      if (t.conformal_distortion() > options.kbound) return;
      t.offset = q0 - t.linear * p0;
      consider(t);
    };
    const double total = static_cast<double>(n) * static_cast<double>(n - 1) * static_cast<double>(n - 2) / 6.0;
    if (total <= static_cast<double>(options.max_triples)) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          for (std::size_t c = b + 1; c < n; ++c) try_triple(a, b, c);
        }
      }
    } else {
      // The sample depends only on the seed and n, so larger bounds search a
      // superset of the maps searched by smaller ones.
      Rng rng(derive_seed(options.seed, n));
      for (std::size_t k = 0; k < options.max_triples; ++k) {
        std::size_t idx[3];
        idx[0] = rng.below(n);
        do idx[1] = rng.below(n); while (idx[1] == idx[0]);
        do idx[2] = rng.below(n); while (idx[2] == idx[0] || idx[2] == idx[1]);
        std::sort(idx, idx + 3);
        try_triple(idx[0], idx[1], idx[2]);
      }
    }
  }

  if (best.count() >= 2) {
    // Least-squares refits of the winning consensus set.
    for (int round = 0; round < 5; ++round) {
      std::vector<Eigen::Vector2d> p;
      std::vector<Eigen::Vector2d> q;
      for (std::size_t c : best.accepted) {
        p.push_back(source_points[flat[c].source]);
        q.push_back(target_points[flat[c].target]);
      }
      bool improved = false;
      std::vector<PlanarTransform> refits = {fit_similarity(p, q)};
      if (options.kbound > 1.0 + 1e-12 && p.size() >= 3) {
        bool ok = false;
        PlanarTransform affine = fit_bounded_affine(p, q, options.kbound, ok);
        if (ok) refits.push_back(affine);
      }
      for (const PlanarTransform& t : refits) {
        ++hypotheses;
        Score s = score(t, ns, nt);
        if (s.count() == best.count() && s.residual_sum < best.residual_sum) {
          best = std::move(s);
          best_t = t;
          improved = true;
        }
      }
      if (!improved) break;
    }
  }

  if (best.count() < options.min_pairs) {
    std::ostringstream msg;
    msg << "largest consistent match set has " << best.count() << " pairs (need " << options.min_pairs << ")";
    throw NoConsensusError(msg.str());
  }

  CorrespondenceSet out;
  out.kbound = options.kbound;
  out.tolerance = tolerance;
  out.transform = best_t;
  out.hypotheses = hypotheses;
  for (std::size_t i = 0; i < best.accepted.size(); ++i) {
    const Candidate& c = flat[best.accepted[i]];
    CorrespondencePair pair;
    pair.source_landmark = c.source;
    pair.target_landmark = c.target;
    pair.residual = best.residuals[i];
    pair.descriptor_distance = c.distance;
    out.pairs.push_back(pair);
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const CorrespondencePair& a, const CorrespondencePair& b) { return a.source_landmark < b.source_landmark; });
  return out;
}

CorrespondenceSet bd_filter(const CandidateSet& candidates, const LandmarkSet& lms1, const LandmarkSet& lms2,
                            const PlanarParam& p1, const PlanarParam& p2, const FilterOptions& options) {
  std::vector<Eigen::Vector2d> src;
  std::vector<Eigen::Vector2d> dst;
  for (VertexId v : lms1.indices) src.emplace_back(p1.uv.row(v).transpose());
  for (VertexId v : lms2.indices) dst.emplace_back(p2.uv.row(v).transpose());
  const Eigen::Vector2d lo = p2.uv.colwise().minCoeff().transpose();
  const Eigen::Vector2d hi = p2.uv.colwise().maxCoeff().transpose();
  CorrespondenceSet out = bd_filter(candidates, src, dst, (hi - lo).norm(), options);
  for (auto& pair : out.pairs) {
    pair.source_vertex = lms1.indices[pair.source_landmark];
    pair.target_vertex = lms2.indices[pair.target_landmark];
  }
  return out;
}

}  // namespace gplmk
