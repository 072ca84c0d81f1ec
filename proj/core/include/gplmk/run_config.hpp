#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "gplmk/kernel.hpp"
#include "gplmk/landmarks.hpp"

namespace gplmk {

// Every tunable of a batch run. The text form is one "key = value" per line;
// '#' starts a comment. Unknown keys are rejected.
//
//   bandwidth            auto | positive number (squared length)
//   bandwidth_fraction   0.08   fraction of the bbox diagonal used by auto
//   lambda, rho          0.5, 1 curvature weight parameters
//   landmarks            40     landmark count L
//   method               gp | gp_nw | gp_euc | gfps | random
//   candidates           2      WKS candidates per landmark (T)
//   kbound               1.5    conformal distortion bound (>= 1)
//   inlier_tolerance     0.02   consensus tolerance, fraction of the target
//                               domain's diagonal
//   wks_eigs, wks_energies  100, 100
//   param_iterations     500    parametrization iteration cap
//   permutations         9999
//   seed                 0
//   jobs                 1
//   allow_reflection     false
//   random_seeds         20     random baseline repetitions in coverage
//   coverage_max         0      0 means the landmark count
//   geodesic_refine      false
//   eps                  auto | positive number (Witten potential scale)
//   eigs                 4      eigenfunctions exported by `eigs`
struct RunConfig {
  std::optional<double> bandwidth;
  double bandwidth_fraction = 0.08;
  WeightParams weights;
  std::size_t landmarks = 40;
  LandmarkMethod method = LandmarkMethod::GP;
  std::size_t candidates = 2;
  double kbound = 1.5;
  double inlier_tolerance = 0.02;
  std::size_t wks_eigs = 100;
  std::size_t wks_energies = 100;
  int param_iterations = 500;
  std::size_t permutations = 9999;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool allow_reflection = false;
  std::size_t random_seeds = 20;
  std::size_t coverage_max = 0;
  bool geodesic_refine = false;
  std::optional<double> eps;
  std::size_t eigs = 4;

  // Parses and validates one entry. Throws ConfigError.
  void set(std::string_view key, std::string_view value);
  void validate() const;
  KernelConfig kernel() const;
  // Canonical "key = value" listing of every field, in a fixed order.
  std::string to_text() const;
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace gplmk
