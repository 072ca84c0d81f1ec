#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gplmk/landmarks.hpp"
#include "gplmk/registration/parametrization.hpp"
#include "gplmk/registration/wks.hpp"

namespace gplmk {

struct Candidate {
  std::size_t source = 0;  // landmark ordinal on the first surface
  std::size_t target = 0;  // landmark ordinal on the second surface
  double distance = 0.0;   // descriptor distance
};

// For each source landmark, its T nearest target landmarks in descriptor
// space, ascending (ties by target ordinal).
struct CandidateSet {
  std::vector<std::vector<Candidate>> per_source;
  std::size_t per_landmark = 0;

  std::vector<Candidate> flattened() const;
};

// Rows are per-landmark descriptors. Throws RangeError unless 1 <= T <= rows of `target`.
CandidateSet candidate_matches(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, std::size_t T);
CandidateSet candidate_matches(const LandmarkSet& lms1, const LandmarkSet& lms2, const WksDescriptor& sig1,
                               const WksDescriptor& sig2, std::size_t T);

// x -> linear * x + offset
struct PlanarTransform {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();

  Eigen::Vector2d operator()(const Eigen::Vector2d& p) const { return linear * p + offset; }
  // Ratio of singular values of the linear part (1 for similarities).
  double conformal_distortion() const;
};

struct CorrespondencePair {
  std::size_t source_landmark = 0;
  std::size_t target_landmark = 0;
  VertexId source_vertex = -1;
  VertexId target_vertex = -1;
  double residual = 0.0;  // |T(p) - q| in the target domain
  double descriptor_distance = 0.0;
};

struct CorrespondenceSet {
  std::vector<CorrespondencePair> pairs;  // sorted by source landmark
  double kbound = 1.0;
  double tolerance = 0.0;  // absolute inlier radius used
  PlanarTransform transform;
  std::size_t hypotheses = 0;  // transforms scored

  std::size_t size() const { return pairs.size(); }
};

struct FilterOptions {
  double kbound = 1.5;
  // Inlier radius as a fraction of the target domain's bounding-box diagonal.
  double inlier_tolerance = 0.02;
  std::uint64_t seed = 0;
  // Three-pair affine hypotheses are enumerated exhaustively up to this
  // count and sampled (with `seed`) beyond it.
  std::size_t max_triples = 200000;
  std::size_t min_pairs = 4;
};

// Largest one-to-one subset of the candidates consistent with a single planar
// orientation-preserving affine map of conformal distortion <= kbound, taken
// over similarities fitted to every two candidate pairs and (for kbound > 1)
// affine maps fitted to three. Inliers lie within the tolerance of the
// transformed source point and are claimed greedily by residual. The winner
// is then refitted by least squares, keeping the refit only if it retains as
// many pairs with a smaller total residual. Throws NoConsensusError below
// min_pairs.
CorrespondenceSet bd_filter(const CandidateSet& candidates, std::span<const Eigen::Vector2d> source_points,
                            std::span<const Eigen::Vector2d> target_points, double domain_diagonal,
                            const FilterOptions& options = {});
CorrespondenceSet bd_filter(const CandidateSet& candidates, const LandmarkSet& lms1, const LandmarkSet& lms2,
                            const PlanarParam& p1, const PlanarParam& p2, const FilterOptions& options = {});

// Least-squares orientation-preserving similarity mapping p to q.
PlanarTransform fit_similarity(std::span<const Eigen::Vector2d> p, std::span<const Eigen::Vector2d> q);

}  // namespace gplmk
