#pragma once

#include <iosfwd>
#include <string>

#include "gplmk/kernel.hpp"
#include "gplmk/landmarks.hpp"
#include "gplmk/mesh.hpp"
#include "gplmk/registration/matching.hpp"
#include "gplmk/registration/parametrization.hpp"
#include "gplmk/registration/surface_map.hpp"
#include "gplmk/registration/wks.hpp"

namespace gplmk {

struct RegistrationParams {
  std::size_t landmarks = 40;
  LandmarkMethod method = LandmarkMethod::GP;  // GP, GP_nW or GP_Euc
  KernelConfig kernel;
  std::size_t candidates = 2;  // T
  WksOptions wks;
  FilterOptions filter;
  ParamOptions param;
  bool allow_reflection = false;
};

// Everything about one surface that does not depend on its partner: the
// unit-area copy, its landmarks, parametrization and landmark descriptors.
struct PreparedSurface {
  TriMesh mesh;
  LandmarkSet landmarks;
  PlanarParam param;
  Eigen::MatrixXd descriptors;  // one WKS row per landmark
};

// Stages are labelled in error messages ("landmarks: ...", "parametrization: ...").
PreparedSurface prepare_surface(const TriMesh& mesh, const RegistrationParams& params);

struct RegistrationResult {
  SurfaceMap map;
  CorrespondenceSet correspondences;
  double procrustes = 0.0;  // d_P of the map
  double source_param_energy = 0.0;
  double target_param_energy = 0.0;
  std::size_t source_landmarks = 0;
  std::size_t target_landmarks = 0;
};

// Candidates -> consensus filter -> constrained planar map -> d_P.
RegistrationResult register_prepared(const PreparedSurface& s1, const PreparedSurface& s2,
                                     const RegistrationParams& params);

// Full pipeline on raw meshes (each normalised to unit area first).
RegistrationResult register_pair(const TriMesh& mesh1, const TriMesh& mesh2, const RegistrationParams& params);

}  // namespace gplmk
