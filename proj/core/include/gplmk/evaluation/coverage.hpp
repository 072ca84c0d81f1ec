#pragma once

#include <span>
#include <string>

#include <Eigen/Core>

#include "gplmk/geometry.hpp"
#include "gplmk/mesh.hpp"

namespace gplmk {

struct CoverageCurve {
  Eigen::VectorXd values;  // values[m - 1] for m = 1..m_max
  std::string method;
};

// Median over observer vertices of the geodesic distance to the nearest of
// the first m automatic landmarks, for m = 1..m_max. An even number of
// observers takes the mean of the two middle distances.
CoverageCurve coverage_curve(const TriMesh& mesh, std::span<const VertexId> observer,
                             std::span<const VertexId> automatic, std::size_t m_max,
                             const GeodesicOptions& geodesic = {});

double median(std::vector<double> values);

}  // namespace gplmk
