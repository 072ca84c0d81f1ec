#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gplmk/geometry.hpp"
#include "gplmk/kernel.hpp"
#include "gplmk/spectral.hpp"

namespace gplmk {

// Symmetrically normalised reweighted kernel D^{-1/2} K D^{-1/2}, with D the
// diagonal of row sums. It is similar to the row-stochastic D^{-1} K, so its
// spectrum lies in [-1, 1] and D^{1/2} 1 is an eigenvector for eigenvalue 1.
struct WittenOperator {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd row_sums;  // diagonal of D
  double bandwidth = 0.0;
  std::optional<VertexField> potential;
};

// Throws ZeroRowSumError if any row sum is not strictly positive.
WittenOperator witten_operator(const KernelMatrix& reweighted);

// Plain kernel at bandwidth t reweighted by exp(-V/eps) (unit vertex measure),
// then normalised.
WittenOperator witten_operator(const TriMesh& mesh, const VertexField& potential, double eps, double t);

// The m eigenpairs with eigenvalues closest to 1 (descending). These
// correspond to the lowest modes of the approximated Witten Laplacian and
// concentrate near the minima of the potential.
EigenPairs localized_eigenfunctions(const WittenOperator& op, Eigen::Index m, const SpectralOptions& options = {});

// Fraction of sum(v^2) carried by the listed vertices.
double mass_fraction(const Eigen::VectorXd& v, std::span<const VertexId> region);

}  // namespace gplmk
