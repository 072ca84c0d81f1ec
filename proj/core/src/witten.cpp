#include "gplmk/witten.hpp"

#include "gplmk/errors.hpp"

namespace gplmk {

WittenOperator witten_operator(const KernelMatrix& reweighted) {
  const Eigen::VectorXd sums = reweighted.entries.rowwise().sum();
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (!(sums[i] > 0.0)) throw ZeroRowSumError("row " + std::to_string(i) + " of the kernel sums to zero");
  }
  const Eigen::VectorXd inv_sqrt = sums.cwiseSqrt().cwiseInverse();
  WittenOperator op;
  op.matrix = inv_sqrt.asDiagonal() * reweighted.entries * inv_sqrt.asDiagonal();
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  op.row_sums = sums;
  op.bandwidth = reweighted.bandwidth;
  return op;
}

WittenOperator witten_operator(const TriMesh& mesh, const VertexField& potential, double eps, double t) {
  if (potential.size() != static_cast<Eigen::Index>(mesh.num_vertices())) {
    throw DimensionMismatchError("potential does not match mesh");
  }
  const KernelMatrix plain = plain_kernel(mesh, t);
  WittenOperator op = witten_operator(reweighted_kernel(plain, potential_weights(potential, eps).values));
  op.potential = potential;
  return op;
}

EigenPairs localized_eigenfunctions(const WittenOperator& op, Eigen::Index m, const SpectralOptions& options) {
  if (m < 1 || m > op.matrix.rows()) throw RangeError("eigenfunction count out of range");
  return largest_eigenpairs(op.matrix, m, options);
}

double mass_fraction(const Eigen::VectorXd& v, std::span<const VertexId> region) {
  const double total = v.squaredNorm();
  if (!(total > 0.0)) return 0.0;
  double inside = 0.0;
  for (VertexId i : region) inside += v[i] * v[i];
  return inside / total;
}

}  // namespace gplmk
