#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace gplmk {

struct EigenPairs {
  Eigen::VectorXd values;   // ordered as requested (see each function)
  Eigen::MatrixXd vectors;  // one unit-norm eigenvector per column
};

struct SpectralOptions {
  // Above this size the iterative solver replaces the dense one.
  Eigen::Index dense_limit = 2000;
  double tolerance = 1e-10;
  Eigen::Index max_krylov = 600;
};

// Flips each column so its largest-magnitude entry is positive.
void canonicalize_signs(Eigen::MatrixXd& vectors);

// Top-m eigenpairs of a dense symmetric matrix, values descending.
EigenPairs largest_eigenpairs(const Eigen::MatrixXd& sym, Eigen::Index m, const SpectralOptions& options = {});

using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

// Lanczos with full reorthogonalisation for the m algebraically largest
// eigenpairs of a symmetric operator. Throws ConvergenceError.
EigenPairs lanczos_largest(const LinearOperator& apply, Eigen::Index n, Eigen::Index m,
                           const SpectralOptions& options = {});

// Smallest m solutions of L phi = lambda M phi with M = diag(mass) > 0,
// values ascending, eigenvectors M-orthonormal (phi^T M phi = 1).
EigenPairs smallest_generalized(const Eigen::SparseMatrix<double>& stiffness, const Eigen::VectorXd& mass,
                                Eigen::Index m, const SpectralOptions& options = {});

}  // namespace gplmk
