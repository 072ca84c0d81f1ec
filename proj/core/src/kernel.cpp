#include "gplmk/kernel.hpp"

#include <cmath>
#include <sstream>

#include "gplmk/errors.hpp"
#include "gplmk/log.hpp"

namespace gplmk {

void WeightParams::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw RangeError("weight lambda must lie in [0, 1]");
  if (!(rho > 0.0)) throw RangeError("weight rho must be positive");
}

KernelMatrix plain_kernel(std::span<const Eigen::Vector3d> points, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw BandwidthError("bandwidth must be positive and finite");
  const auto n = static_cast<Eigen::Index>(points.size());
  const double half_t = 0.5 * t;
  KernelMatrix k;
  k.entries.resize(n, n);
  k.bandwidth = t;
  k.kind = KernelKind::Plain;
  for (Eigen::Index j = 0; j < n; ++j) {
    k.entries(j, j) = 1.0;
    const Eigen::Vector3d& pj = points[static_cast<std::size_t>(j)];
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double value = std::exp(-(points[static_cast<std::size_t>(i)] - pj).squaredNorm() / half_t);
      k.entries(i, j) = value;
      k.entries(j, i) = value;
    }
  }
  return k;
}

KernelMatrix plain_kernel(const TriMesh& mesh, double t) { return plain_kernel(mesh.vertices(), t); }

VertexField weight_function(const VertexField& kappa, const VertexField& eta, const VertexField& areas,
                            const WeightParams& params) {
  params.validate();
  const Eigen::Index n = areas.size();
  if (kappa.size() != n || eta.size() != n) throw DimensionMismatchError("curvature/area fields differ in length");
  if ((areas.values.array() <= 0.0).any()) throw RangeError("Voronoi areas must be positive");

  const double total_area = areas.values.sum();
  const Eigen::ArrayXd k_pow = kappa.values.array().abs().pow(params.rho);
  const Eigen::ArrayXd e_pow = eta.values.array().abs().pow(params.rho);
  const double k_mass = (k_pow * areas.values.array()).sum();
  const double e_mass = (e_pow * areas.values.array()).sum();

  // Dimensionless vanishing tests: kappa ~ 1/length^2, eta ~ 1/length.
  const bool k_zero = kappa.values.cwiseAbs().maxCoeff() * total_area < 1e-8 || !(k_mass > 0.0);
  const bool e_zero = eta.values.cwiseAbs().maxCoeff() * std::sqrt(total_area) < 1e-8 || !(e_mass > 0.0);

  double k_share = params.lambda;
  double e_share = 1.0 - params.lambda;
  if (k_zero && e_zero) throw AllZeroCurvatureError("both curvature fields vanish; weight is undefined");
  if (k_zero && k_share > 0.0) {
    log_warn("Gaussian curvature vanishes identically; using the mean-curvature term only");
    k_share = 0.0;
    e_share = 1.0;
  } else if (e_zero && e_share > 0.0) {
    log_warn("mean curvature vanishes identically; using the Gaussian-curvature term only");
    k_share = 1.0;
    e_share = 0.0;
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (k_share > 0.0) w.array() += k_share * k_pow / k_mass;
  if (e_share > 0.0) w.array() += e_share * e_pow / e_mass;
  return {std::move(w), FieldKind::Weight};
}

VertexField potential_weights(const VertexField& potential, double eps) {
  if (!(eps > 0.0)) throw RangeError("potential scale eps must be positive");
  return {(-potential.values.array() / eps).exp().matrix(), FieldKind::Weight};
}

KernelMatrix reweighted_kernel(const KernelMatrix& plain, const Eigen::VectorXd& measure) {
  const Eigen::Index n = plain.size();
  if (measure.size() != n || plain.entries.cols() != n) {
    std::ostringstream msg;
    msg << "kernel is " << plain.entries.rows() << "x" << plain.entries.cols() << " but measure has "
        << measure.size() << " entries";
    throw DimensionMismatchError(msg.str());
  }
  if ((measure.array() < 0.0).any() || !measure.allFinite()) {
    throw RangeError("reweighting measure must be finite and nonnegative");
  }
  // K^T W K = B^T B with B = W^{1/2} K; only the lower triangle is accumulated.
  const Eigen::MatrixXd scaled = measure.cwiseSqrt().asDiagonal() * plain.entries;
  KernelMatrix out;
  out.entries = Eigen::MatrixXd::Zero(n, n);
  out.entries.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
  out.entries.triangularView<Eigen::StrictlyUpper>() = out.entries.transpose();
  out.bandwidth = plain.bandwidth;
  out.kind = KernelKind::Reweighted;
  return out;
}

KernelMatrix reweighted_kernel(const KernelMatrix& plain, const VertexField& weight, const VertexField& areas) {
  if (weight.size() != areas.size()) throw DimensionMismatchError("weight and area fields differ in length");
  return reweighted_kernel(plain, weight.values.cwiseProduct(areas.values));
}

double default_bandwidth(const TriMesh& mesh, double diagonal_fraction) {
  const double s = diagonal_fraction * mesh.bounding_box_diagonal();
  return s * s;
}

KernelMatrix landmarking_kernel(const TriMesh& mesh, const KernelConfig& config) {
  const double t = config.bandwidth.value_or(default_bandwidth(mesh, config.bandwidth_fraction));
  KernelMatrix plain = plain_kernel(mesh, t);
  switch (config.variant) {
    case KernelVariant::Euclidean:
      return plain;
    case KernelVariant::NonWeighted: {
      const VertexField areas = voronoi_areas(mesh);
      return reweighted_kernel(plain, areas.values);
    }
    case KernelVariant::Reweighted: {
      const VertexField areas = voronoi_areas(mesh);
      const VertexField kappa = gaussian_curvature(mesh, areas);
      const VertexField eta = mean_curvature(mesh, areas);
      const VertexField w = weight_function(kappa, eta, areas, config.weights);
      return reweighted_kernel(plain, w, areas);
    }
  }
  return plain;
}

}  // namespace gplmk
