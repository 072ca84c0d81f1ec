#include "gplmk/evaluation/coverage.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "gplmk/errors.hpp"

namespace gplmk {

double median(std::vector<double> values) {
  if (values.empty()) throw RangeError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

CoverageCurve coverage_curve(const TriMesh& mesh, std::span<const VertexId> observer,
                             std::span<const VertexId> automatic, std::size_t m_max,
                             const GeodesicOptions& geodesic) {
  if (observer.empty()) throw RangeError("no observer landmarks");
  if (m_max < 1 || m_max > automatic.size()) throw RangeError("m_max must lie in [1, number of landmarks]");
  const auto nv = static_cast<VertexId>(mesh.num_vertices());
  for (VertexId v : observer) {
    if (v < 0 || v >= nv) throw RangeError("observer landmark not on mesh");
  }
  for (VertexId v : automatic) {
    if (v < 0 || v >= nv) throw RangeError("landmark not on mesh");
  }
  CoverageCurve curve;
  curve.values.resize(static_cast<Eigen::Index>(m_max));
  std::vector<double> nearest(observer.size(), std::numeric_limits<double>::infinity());
  for (std::size_t m = 0; m < m_max; ++m) {
    const VertexId src[] = {automatic[m]};
    const Eigen::VectorXd d = geodesic_distances(mesh, src, geodesic);
    for (std::size_t k = 0; k < observer.size(); ++k) nearest[k] = std::min(nearest[k], d[observer[k]]);
    curve.values[static_cast<Eigen::Index>(m)] = median(nearest);
  }
  return curve;
}

}  // namespace gplmk
