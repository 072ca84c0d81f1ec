#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "gplmk/geometry.hpp"
#include "gplmk/kernel.hpp"
#include "gplmk/mesh.hpp"

namespace gplmk {

enum class LandmarkMethod { GP, GP_nW, GP_Euc, GFPS, Random, Observer };

std::string_view to_string(LandmarkMethod method);
// Accepts the names produced by to_string (case-insensitive). Throws ConfigError.
LandmarkMethod landmark_method_from_string(std::string_view name);
KernelVariant kernel_variant_for(LandmarkMethod method);

struct LandmarkSet {
  std::vector<VertexId> indices;  // ordered, distinct
  std::vector<double> scores;     // selection-time score per landmark
  LandmarkMethod method = LandmarkMethod::GP;
  // Weight parameters for GP runs, RNG seed for random draws.
  std::variant<std::monostate, WeightParams, std::uint64_t> params;
  // Set when the kernel's numerical rank ran out before the requested count.
  bool truncated = false;

  std::size_t size() const { return indices.size(); }
  LandmarkSet prefix(std::size_t count) const;
};

struct GreedyOptions {
  // Return a shorter, flagged set instead of throwing RankExhaustionError.
  bool allow_truncation = false;
  // Stop once max uncertainty < exhaustion_ratio * max diagonal.
  double exhaustion_ratio = 1e-10;
  // Values within tie_tolerance * max diagonal of the maximum count as tied;
  // the lowest vertex index wins.
  double tie_tolerance = 1e-12;
};

struct GreedySelection {
  LandmarkSet landmarks;
  // Conditional variance after the last selection (zero at landmarks).
  Eigen::VectorXd residual_variance;
};

// Greedy maximum-variance selection on a PSD covariance. The first pick is
// the largest diagonal entry; each later pick maximises the conditional
// variance given the landmarks so far. Runs as a pivoted Cholesky so each step
// costs O(|V| k).
GreedySelection greedy_select(const KernelMatrix& covariance, std::size_t count, const GreedyOptions& options = {});
LandmarkSet gp_landmarks(const KernelMatrix& covariance, std::size_t count, const GreedyOptions& options = {});

// Conditional variance K(x,x) - k(x,X) K(X,X)^{-1} k(X,x) given landmarks X,
// evaluated directly with a Cholesky factor of K(X,X). Values in
// [-1e-9 * max diag, 0) are clamped to 0; lower values are clamped with a
// warning. Throws SingularSubmatrixError.
VertexField uncertainty_field(const KernelMatrix& covariance, std::span<const VertexId> landmarks);

// Geodesic farthest-point sampling seeded at `seed_vertex`.
LandmarkSet gfps_landmarks(const TriMesh& mesh, std::size_t count, VertexId seed_vertex,
                           const GeodesicOptions& geodesic = {});

// `count` distinct vertices uniformly without replacement, reproducible per seed.
LandmarkSet random_landmarks(std::size_t num_vertices, std::size_t count, std::uint64_t seed);
inline LandmarkSet random_landmarks(const TriMesh& mesh, std::size_t count, std::uint64_t seed) {
  return random_landmarks(mesh.num_vertices(), count, seed);
}

// det K(greedy n points) / max over all n-subsets of det K(subset).
// Throws ComplexityGuardError when more than 10^6 subsets would be scanned.
double greedy_determinant_ratio(const KernelMatrix& covariance, std::size_t n);

}  // namespace gplmk
