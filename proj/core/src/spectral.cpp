#include "gplmk/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "gplmk/errors.hpp"

namespace gplmk {
namespace {

// Deterministic, non-degenerate start vectors; `seed` varies the pattern.
Eigen::VectorXd start_vector(Eigen::Index n, Eigen::Index seed) {
  Eigen::VectorXd v(n);
  const double phase = 0.7 + 1.9 * static_cast<double>(seed);
  const double freq = 1.3 + 0.37 * static_cast<double>(seed);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(freq * static_cast<double>(i) + phase);
  return v.normalized();
}

}  // namespace

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      // Small relative slack keeps the choice stable under round-off.
      if (a > best * (1.0 + 1e-9)) {
        best = a;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

namespace {

// One Lanczos run restricted to the orthogonal complement of `locked`.
EigenPairs lanczos_run(const LinearOperator& apply, Eigen::Index n, Eigen::Index m, const SpectralOptions& options,
                       const Eigen::MatrixXd& locked, Eigen::Index seed) {
  const Eigen::Index free_dim = n - locked.cols();
  const Eigen::Index max_dim = std::min(free_dim, std::max(options.max_krylov, 2 * m + 20));
  Eigen::MatrixXd basis(n, max_dim);
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd start = start_vector(n, seed);
  for (int pass = 0; pass < 2 && locked.cols() > 0; ++pass) start -= locked * (locked.transpose() * start);
  basis.col(0) = start.normalized();
  Eigen::VectorXd w(n);

  Eigen::Index dim = 0;
  for (Eigen::Index j = 0; j < max_dim; ++j) {
    apply(basis.col(j), w);
    const double a = basis.col(j).dot(w);
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against the whole basis and the locked vectors.
    for (int pass = 0; pass < 2; ++pass) {
      if (locked.cols() > 0) w.noalias() -= locked * (locked.transpose() * w);
      const Eigen::VectorXd coeff = basis.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis.leftCols(j + 1) * coeff;
    }
    const double b = w.norm();
    dim = j + 1;

    const bool exhausted = b < 1e-13 * std::max(1.0, std::abs(a));
    const bool check = dim >= m && (dim % 10 == 0 || dim == max_dim || exhausted);
    if (check) {
      Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
      for (Eigen::Index k = 0; k < dim; ++k) {
        tri(k, k) = alpha[static_cast<std::size_t>(k)];
        if (k + 1 < dim) tri(k, k + 1) = tri(k + 1, k) = beta[static_cast<std::size_t>(k)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
      const Eigen::VectorXd& theta = small.eigenvalues();
      const double scale = std::max(std::abs(theta[0]), std::abs(theta[dim - 1]));
      bool converged = true;
      for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index col = dim - 1 - k;
        const double residual = std::abs(b * small.eigenvectors()(dim - 1, col));
        if (residual > options.tolerance * std::max(scale, 1e-300)) converged = false;
      }
      if (converged || exhausted || dim == max_dim) {
        if (!converged && !exhausted) throw ConvergenceError("Lanczos did not converge within the Krylov limit");
        EigenPairs out;
        out.values.resize(m);
        out.vectors.resize(n, m);
        for (Eigen::Index k = 0; k < m; ++k) {
          const Eigen::Index col = dim - 1 - k;
          out.values[k] = theta[col];
          out.vectors.col(k) = (basis.leftCols(dim) * small.eigenvectors().col(col)).normalized();
        }
        return out;
      }
    }
    if (exhausted) {
      throw ConvergenceError("Krylov space exhausted before enough eigenpairs were found");
    }
    if (j + 1 < max_dim) {
      beta.push_back(b);
      basis.col(j + 1) = w / b;
    }
  }
  throw ConvergenceError("Lanczos did not converge");
}

}  // namespace

EigenPairs lanczos_largest(const LinearOperator& apply, Eigen::Index n, Eigen::Index m,
                           const SpectralOptions& options) {
  if (m < 1 || m > n) throw RangeError("requested eigenpair count out of range");
  // A single Krylov sequence sees one copy of a repeated eigenvalue. Further
  // runs on the complement of everything found so far pick up the missing
  // copies until the complement's top value falls below the m-th kept value.
  EigenPairs found = lanczos_run(apply, n, m, options, Eigen::MatrixXd(n, 0), 0);
  Eigen::MatrixXd locked = found.vectors;
  for (Eigen::Index round = 1; locked.cols() < n; ++round) {
    const EigenPairs extra = lanczos_run(apply, n, 1, options, locked, round);
    const double kth = found.values[m - 1];
    const double scale = std::max(std::abs(found.values[0]), std::abs(kth));
    if (!(extra.values[0] > kth + 1e3 * options.tolerance * std::max(scale, 1e-300))) break;
    // Insert in descending order and drop the old m-th pair.
    Eigen::Index pos = 0;
    while (pos < m && found.values[pos] >= extra.values[0]) ++pos;
    for (Eigen::Index k = m - 1; k > pos; --k) {
      found.values[k] = found.values[k - 1];
      found.vectors.col(k) = found.vectors.col(k - 1);
    }
    found.values[pos] = extra.values[0];
    found.vectors.col(pos) = extra.vectors.col(0);
    locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
    locked.col(locked.cols() - 1) = extra.vectors.col(0);
  }
  canonicalize_signs(found.vectors);
  return found;
}

EigenPairs largest_eigenpairs(const Eigen::MatrixXd& sym, Eigen::Index m, const SpectralOptions& options) {
  const Eigen::Index n = sym.rows();
  if (sym.cols() != n) throw DimensionMismatchError("matrix is not square");
  if (m < 1 || m > n) throw RangeError("requested eigenpair count out of range");
  if (n <= options.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw ConvergenceError("dense symmetric eigensolver failed");
    EigenPairs out;
    out.values = solver.eigenvalues().tail(m).reverse();
    out.vectors = solver.eigenvectors().rightCols(m).rowwise().reverse();
    canonicalize_signs(out.vectors);
    return out;
  }
  return lanczos_largest([&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out.noalias() = sym * in; }, n, m,
                         options);
}

EigenPairs smallest_generalized(const Eigen::SparseMatrix<double>& stiffness, const Eigen::VectorXd& mass,
                                Eigen::Index m, const SpectralOptions& options) {
  const Eigen::Index n = stiffness.rows();
  if (stiffness.cols() != n || mass.size() != n) throw DimensionMismatchError("stiffness/mass size mismatch");
  if (m < 1 || m > n) throw RangeError("requested eigenpair count out of range");
  if ((mass.array() <= 0.0).any()) throw RangeError("mass matrix must be positive");
  const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();

  EigenPairs out;
  if (n <= options.dense_limit) {
    const Eigen::MatrixXd sym = inv_sqrt.asDiagonal() * Eigen::MatrixXd(stiffness) * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (sym + sym.transpose()));
    if (solver.info() != Eigen::Success) throw ConvergenceError("dense symmetric eigensolver failed");
    out.values = solver.eigenvalues().head(m);
    out.vectors = solver.eigenvectors().leftCols(m);
  } else {
    // Shift-invert: the largest eigenvalues of (A + shift I)^{-1} are the
    // smallest of A = M^{-1/2} L M^{-1/2}.
    Eigen::SparseMatrix<double> a = inv_sqrt.asDiagonal() * stiffness * inv_sqrt.asDiagonal();
    double diag_mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) diag_mean += a.coeff(i, i);
    diag_mean /= static_cast<double>(n);
    const double shift = 1e-8 * std::max(diag_mean, 1e-300);
    Eigen::SparseMatrix<double> shifted = a;
    for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw ConvergenceError("sparse factorisation failed in shift-invert");
    EigenPairs inv = lanczos_largest([&](const Eigen::VectorXd& in, Eigen::VectorXd& o) { o = ldlt.solve(in); }, n,
                                     m, options);
    out.values = inv.values.cwiseInverse().array() - shift;
    out.vectors = std::move(inv.vectors);
  }
  // Back to the generalised problem: phi = M^{-1/2} y has phi^T M phi = 1.
  out.vectors = inv_sqrt.asDiagonal() * out.vectors;
  canonicalize_signs(out.vectors);
  return out;
}

}  // namespace gplmk
