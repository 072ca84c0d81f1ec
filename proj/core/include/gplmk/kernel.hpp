#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

#include "gplmk/geometry.hpp"
#include "gplmk/mesh.hpp"

namespace gplmk {

enum class KernelKind { Plain, Reweighted };

// Dense symmetric PSD covariance over mesh vertices.
struct KernelMatrix {
  Eigen::MatrixXd entries;
  double bandwidth = 0.0;  // squared-length units
  KernelKind kind = KernelKind::Plain;

  Eigen::Index size() const { return entries.rows(); }
};

// Parameters of the curvature weight w = lambda*|kappa|^rho/.. + (1-lambda)*|eta|^rho/..
struct WeightParams {
  double lambda = 0.5;
  double rho = 1.0;

  void validate() const;  // RangeError unless lambda in [0,1], rho > 0
};

// exp(-|x_i - x_j|^2 / (t/2)). Throws BandwidthError for t <= 0.
KernelMatrix plain_kernel(std::span<const Eigen::Vector3d> points, double t);
KernelMatrix plain_kernel(const TriMesh& mesh, double t);

// Area-normalised curvature weight. A curvature field that vanishes
// identically (e.g. Gaussian curvature of a flat or developable patch) has
// its term dropped and the other renormalised to unit mass, with a warning.
// Throws AllZeroCurvatureError when both vanish.
VertexField weight_function(const VertexField& kappa, const VertexField& eta, const VertexField& areas,
                            const WeightParams& params);

// w = exp(-V / eps), the potential form used for Witten-operator analysis.
VertexField potential_weights(const VertexField& potential, double eps);

// K^T diag(measure) K. `measure` must be nonnegative.
KernelMatrix reweighted_kernel(const KernelMatrix& plain, const Eigen::VectorXd& measure);
// K^T diag(w * nu) K.
KernelMatrix reweighted_kernel(const KernelMatrix& plain, const VertexField& weight, const VertexField& areas);

// (0.08 * bounding-box diagonal)^2 unless another fraction is given.
double default_bandwidth(const TriMesh& mesh, double diagonal_fraction = 0.08);

enum class KernelVariant {
  Reweighted,  // curvature-reweighted heat kernel
  NonWeighted, // w == 1 in the reweighted form
  Euclidean,   // plain squared-exponential kernel
};

struct KernelConfig {
  KernelVariant variant = KernelVariant::Reweighted;
  std::optional<double> bandwidth;  // default_bandwidth() when empty
  double bandwidth_fraction = 0.08;
  WeightParams weights;
};

// Builds the covariance used by landmark selection for the chosen variant.
KernelMatrix landmarking_kernel(const TriMesh& mesh, const KernelConfig& config);

}  // namespace gplmk
