#include "gplmk/registration/wks.hpp"

#include <algorithm>
#include <cmath>

#include "gplmk/errors.hpp"
#include "gplmk/geometry.hpp"

namespace gplmk {

Eigen::MatrixXd WksDescriptor::rows(std::span<const VertexId> vertices) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(vertices.size()), values.cols());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] < 0 || vertices[i] >= values.rows()) throw RangeError("descriptor row out of range");
    out.row(static_cast<Eigen::Index>(i)) = values.row(vertices[i]);
  }
  return out;
}

WksDescriptor wks(const TriMesh& mesh, const WksOptions& options) {
  const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(options.eigenpairs, mesh.num_vertices() / 2));
  if (m < 2) throw RangeError("mesh too small for a wave kernel signature");
  if (options.energies < 1) throw RangeError("need at least one WKS energy");

  const EigenPairs pairs = smallest_generalized(cotan_laplacian(mesh), voronoi_areas(mesh).values, m, options.spectral);
  WksDescriptor out;
  out.eigenvalues = pairs.values;

  Eigen::VectorXd log_lambda(m - 1);
  for (Eigen::Index k = 1; k < m; ++k) log_lambda[k - 1] = std::log(std::max(pairs.values[k], 1e-12));
  const double lo = log_lambda[0];
  const double hi = log_lambda.maxCoeff() / 1.02;
  const auto e = static_cast<Eigen::Index>(options.energies);
  out.log_energies = e > 1 ? Eigen::VectorXd(Eigen::VectorXd::LinSpaced(e, lo, hi)) : Eigen::VectorXd(Eigen::VectorXd::Constant(1, lo));
  const double step = e > 1 ? (hi - lo) / static_cast<double>(e - 1) : std::abs(hi - lo);
  out.sigma = options.variance * step;
  if (!(out.sigma > 0.0)) throw ConvergenceError("Laplacian spectrum too narrow for WKS energies");

  // gauss(k, j) = g_k(e_j)
  Eigen::MatrixXd gauss(m - 1, e);
  for (Eigen::Index j = 0; j < e; ++j) {
    gauss.col(j) = (-(out.log_energies[j] - log_lambda.array()).square() / (2.0 * out.sigma * out.sigma)).exp();
  }
  const Eigen::RowVectorXd norm = gauss.colwise().sum();
  const Eigen::MatrixXd squared = pairs.vectors.rightCols(m - 1).array().square();
  out.values = squared * gauss;
  for (Eigen::Index j = 0; j < e; ++j) {
    out.values.col(j) /= norm[j] > 0.0 ? norm[j] : 1.0;
  }
  return out;
}

}  // namespace gplmk
