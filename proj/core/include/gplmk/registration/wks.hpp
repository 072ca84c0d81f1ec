#pragma once

#include <span>

#include <Eigen/Core>

#include "gplmk/mesh.hpp"
#include "gplmk/spectral.hpp"

namespace gplmk {

struct WksOptions {
  std::size_t eigenpairs = 100;  // capped at |V| / 2
  std::size_t energies = 100;
  double variance = 7.0;  // sigma in units of the energy step
  SpectralOptions spectral;
};

// Wave kernel signature: for log-energy e,
//   WKS(x, e) = sum_k phi_k(x)^2 g_k(e) / sum_k g_k(e),
//   g_k(e) = exp(-(e - log lambda_k)^2 / (2 sigma^2)),
// over the cotangent Laplacian eigenpairs L phi = lambda M phi (M the mixed
// Voronoi areas, phi M-orthonormal), skipping the constant mode. Energies are
// spaced evenly from log lambda_1 to log lambda_max / 1.02.
struct WksDescriptor {
  Eigen::MatrixXd values;  // |V| x energies
  Eigen::VectorXd log_energies;
  Eigen::VectorXd eigenvalues;  // including the leading ~0 mode
  double sigma = 0.0;

  Eigen::MatrixXd rows(std::span<const VertexId> vertices) const;
};

// Throws ConvergenceError, RangeError when fewer than 2 eigenpairs fit.
WksDescriptor wks(const TriMesh& mesh, const WksOptions& options = {});

}  // namespace gplmk
