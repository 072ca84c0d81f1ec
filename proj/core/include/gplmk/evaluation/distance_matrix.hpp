#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gplmk/mesh.hpp"
#include "gplmk/registration/pipeline.hpp"

namespace gplmk {

// Symmetric, zero diagonal, nonnegative. Missing entries (failed
// registrations) are NaN.
struct DistanceMatrix {
  Eigen::MatrixXd entries;
  std::vector<std::string> labels;
  std::vector<std::string> groups;  // empty, or one per label

  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
  bool has_missing() const;
  // Throws RangeError when the invariants fail (missing entries allowed).
  void validate() const;
};

// Header ",label_1,...,label_n"; one row per label; missing entries as "NA".
void write_distance_csv(const DistanceMatrix& d, std::ostream& out);
DistanceMatrix read_distance_csv(std::istream& in);
DistanceMatrix read_distance_csv(const std::filesystem::path& path);

// Two-column "label,group" CSV (header optional). Assigns groups to `d`
// by label; throws ParseError for unknown or unassigned labels.
void read_groups_csv(std::istream& in, DistanceMatrix& d);
void read_groups_csv(const std::filesystem::path& path, DistanceMatrix& d);
// Group names mapped to 0..a-1 in order of first appearance.
std::vector<int> group_indices(const std::vector<std::string>& groups);

struct PairFailure {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string message;
};

struct DistanceMatrixRun {
  DistanceMatrix matrix;
  std::vector<PairFailure> failures;
};

// Registers every ordered pair and stores (d(f_ij) + d(f_ji)) / 2. A failed
// direction leaves the entry missing and is recorded instead of aborting.
// `jobs` workers share the pairs; the result does not depend on `jobs`.
DistanceMatrixRun registration_distance_matrix(const std::vector<TriMesh>& meshes,
                                               const std::vector<std::string>& labels,
                                               const RegistrationParams& params, unsigned jobs = 1);

// Landmark Procrustes distances between labelled point sets (rows paired).
DistanceMatrix landmark_distance_matrix(const std::vector<Eigen::MatrixX3d>& configurations,
                                        const std::vector<std::string>& labels, bool allow_reflection = false);

}  // namespace gplmk
