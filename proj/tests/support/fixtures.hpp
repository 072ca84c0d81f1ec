#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gplmk/kernel.hpp"
#include "gplmk/mesh.hpp"
#include "gplmk/random.hpp"

namespace gplmk::test {

std::vector<Eigen::Vector3d> random_cloud(Rng& rng, std::size_t n);

// Random PSD covariances of three kinds, cycled by `kind % 3`:
// plain squared-exponential on a random cloud, the same reweighted by a
// random positive measure, and a random Gram matrix of full rank.
KernelMatrix random_psd(Rng& rng, std::size_t n, int kind);
KernelMatrix random_gram(Rng& rng, std::size_t n, std::size_t rank);

// Conditional variance computed from an explicit inverse of K(X, X).
Eigen::VectorXd oracle_variance(const Eigen::MatrixXd& k, const std::vector<VertexId>& picks);

// Greedy maximum-variance selection driven by oracle_variance, with the same
// tie rule as the library (within 1e-12 * max diagonal, lowest index).
std::vector<VertexId> oracle_greedy(const Eigen::MatrixXd& k, std::size_t count);

// Pearson correlation of the strict upper triangles.
double pearson_upper(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Classical one-way ANOVA F of scalar observations.
double anova_f(const std::vector<double>& x, const std::vector<int>& groups);

// Crown fixture used across registration tests; `variant` perturbs the cusps.
TriMesh crown_fixture(int rings, int variant = 0);

// Two shape families for morphometric tests: family 0 carries the four-cusp
// molar pattern, family 1 two tall cusps along one axis. Members differ by a
// small member-specific jitter of the cusps.
TriMesh family_surface(int family, int member, int rings);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace gplmk::test
