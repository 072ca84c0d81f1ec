#include "gplmk/registration/pipeline.hpp"

#include <utility>

#include "gplmk/errors.hpp"
#include "gplmk/evaluation/procrustes.hpp"

namespace gplmk {
namespace {

template <typename F>
auto stage(const char* label, F&& body) {
  try {
    return body();
  } catch (Error& e) {
    e.add_context(label);
    throw;
  }
}

}  // namespace

PreparedSurface prepare_surface(const TriMesh& mesh, const RegistrationParams& params) {
  TriMesh unit = stage("normalization", [&] { return mesh.normalized_to_unit_area(); });
  if (!unit.is_disk_type()) throw NotDiskTypeError("parametrization: registration needs disk-type surfaces");
  LandmarkSet landmarks = stage("landmarks", [&] {
    if (params.method != LandmarkMethod::GP && params.method != LandmarkMethod::GP_nW &&
        params.method != LandmarkMethod::GP_Euc) {
      throw ConfigError("registration landmarks must come from a GP variant");
    }
    KernelConfig kc = params.kernel;
    kc.variant = kernel_variant_for(params.method);
    const KernelMatrix k = landmarking_kernel(unit, kc);
    GreedyOptions greedy;
    greedy.allow_truncation = true;
    const std::size_t count = std::min(params.landmarks, unit.num_vertices());
    LandmarkSet set = gp_landmarks(k, count, greedy);
    set.method = params.method;
    set.params = kc.weights;
    return set;
  });
  PlanarParam param = stage("parametrization", [&] { return aiap_parametrize(unit, params.param); });
  Eigen::MatrixXd descriptors = stage("wks", [&] { return wks(unit, params.wks).rows(landmarks.indices); });
  return PreparedSurface{std::move(unit), std::move(landmarks), std::move(param), std::move(descriptors)};
}

RegistrationResult register_prepared(const PreparedSurface& s1, const PreparedSurface& s2,
                                     const RegistrationParams& params) {
  RegistrationResult out;
  out.source_landmarks = s1.landmarks.size();
  out.target_landmarks = s2.landmarks.size();
  out.source_param_energy = s1.param.energy;
  out.target_param_energy = s2.param.energy;
  const CandidateSet cands = stage("candidates", [&] {
    return candidate_matches(s1.descriptors, s2.descriptors, std::min(params.candidates, s2.landmarks.size()));
  });
  out.correspondences = stage("matching", [&] {
    return bd_filter(cands, s1.landmarks, s2.landmarks, s1.param, s2.param, params.filter);
  });
  out.map = stage("interpolation", [&] {
    return interpolate_map(s1.mesh, s1.param, s2.param, out.correspondences, s2.mesh, params.param);
  });
  out.procrustes = stage("procrustes", [&] {
    return procrustes_of_map(out.map, s1.mesh, s2.mesh, params.allow_reflection);
  });
  return out;
}

RegistrationResult register_pair(const TriMesh& mesh1, const TriMesh& mesh2, const RegistrationParams& params) {
  const PreparedSurface s1 = prepare_surface(mesh1, params);
  const PreparedSurface s2 = prepare_surface(mesh2, params);
  return register_prepared(s1, s2, params);
}

}  // namespace gplmk
