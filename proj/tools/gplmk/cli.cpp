#include "gplmk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gplmk/errors.hpp"
#include "gplmk/evaluation/coverage.hpp"
#include "gplmk/evaluation/distance_matrix.hpp"
#include "gplmk/evaluation/permutation_tests.hpp"
#include "gplmk/geometry.hpp"
#include "gplmk/kernel.hpp"
#include "gplmk/landmark_io.hpp"
#include "gplmk/landmarks.hpp"
#include "gplmk/log.hpp"
#include "gplmk/matrix_io.hpp"
#include "gplmk/mesh_io.hpp"
#include "gplmk/random.hpp"
#include "gplmk/registration/pipeline.hpp"
#include "gplmk/run_config.hpp"
#include "gplmk/witten.hpp"

namespace gplmk::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Globals {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::size_t> landmarks;
  std::string method;
  bool verbose = false;
  bool quiet = false;
};

RunConfig resolve_config(const Globals& g) {
  RunConfig config;
  std::string path = g.config;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') path = env;
  }
  if (!path.empty()) {
    config = load_run_config(path);
    log_info("config: " + path);
  }
  for (const std::string& kv : g.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) config.seed = *g.seed;
  if (g.jobs) config.jobs = *g.jobs;
  if (g.landmarks) config.landmarks = *g.landmarks;
  if (!g.method.empty()) config.method = landmark_method_from_string(g.method);
  config.validate();
  return config;
}

json config_json(const RunConfig& config) {
  json out = json::object();
  std::istringstream in(config.to_text());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  return out;
}

void write_json(const json& j, const fs::path& path, bool print) {
  const std::string text = j.dump(2) + "\n";
  auto out = open_output(path);
  out << text;
  if (print) std::cout << text;
}

// JSON numbers cannot hold inf/nan; those become null.
json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_matrix(const Eigen::MatrixXd& m, const fs::path& path) {
  if (path.extension() == ".bin") {
    write_matrix_binary(m, path);
  } else {
    auto out = open_output(path);
    write_matrix_csv(m, out);
  }
}

LandmarkSet generate(const TriMesh& mesh, const RunConfig& config, LandmarkMethod method, std::size_t count,
                     std::optional<VertexId> seed_vertex, std::uint64_t seed) {
  switch (method) {
    case LandmarkMethod::GP:
    case LandmarkMethod::GP_nW:
    case LandmarkMethod::GP_Euc: {
      KernelConfig kc = config.kernel();
      kc.variant = kernel_variant_for(method);
      const KernelMatrix k = landmarking_kernel(mesh, kc);
      GreedyOptions greedy;
      greedy.allow_truncation = true;
      LandmarkSet set = gp_landmarks(k, count, greedy);
      set.method = method;
      set.params = config.weights;
      if (set.truncated) log_warn("kernel rank exhausted: returning " + std::to_string(set.size()) + " landmarks");
      return set;
    }
    case LandmarkMethod::GFPS: {
      VertexId start = 0;
      if (seed_vertex) {
        start = *seed_vertex;
      } else {
        // Same first point as GP landmarking.
        KernelConfig kc = config.kernel();
        kc.variant = KernelVariant::Reweighted;
        start = gp_landmarks(landmarking_kernel(mesh, kc), 1).indices.front();
      }
      GeodesicOptions geo;
      geo.refine_midpoints = config.geodesic_refine;
      return gfps_landmarks(mesh, count, start, geo);
    }
    case LandmarkMethod::Random:
      return random_landmarks(mesh, count, seed);
    case LandmarkMethod::Observer:
      break;
  }
  throw ConfigError("method 'observer' reads landmarks from a file and cannot generate them");
}

int cmd_landmark(const RunConfig& config, const std::string& mesh_path, const std::string& out_path,
                 std::optional<VertexId> seed_vertex, const std::string& kernel_out) {
  const TriMesh mesh = load_mesh(mesh_path);
  log_info("mesh " + mesh_path + ": " + std::to_string(mesh.num_vertices()) + " vertices");
  const LandmarkSet set = generate(mesh, config, config.method, config.landmarks, seed_vertex, config.seed);
  write_landmarks_csv(set, mesh, fs::path(out_path));
  if (!kernel_out.empty()) {
    if (config.method != LandmarkMethod::GP && config.method != LandmarkMethod::GP_nW &&
        config.method != LandmarkMethod::GP_Euc) {
      throw ConfigError("--kernel-out needs a GP method");
    }
    write_matrix(landmarking_kernel(mesh, config.kernel()).entries, kernel_out);
  }
  log_info("wrote " + std::to_string(set.size()) + " landmarks to " + out_path);
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_coverage(const RunConfig& config, const std::string& mesh_path, const std::string& observer_path,
                 const std::string& methods_arg, const std::string& out_path) {
  const TriMesh mesh = load_mesh(mesh_path);
  const LandmarkReadResult observer = read_landmarks_csv(fs::path(observer_path), mesh);
  if (!observer.snap_distances.empty()) {
    const double worst = *std::max_element(observer.snap_distances.begin(), observer.snap_distances.end());
    log_info("observer points snapped to vertices; largest snap distance " + std::to_string(worst));
  }
  const std::size_t m_max = config.coverage_max > 0 ? config.coverage_max : config.landmarks;
  if (m_max > config.landmarks) throw RangeError("coverage_max exceeds the landmark count");
  GeodesicOptions geo;
  geo.refine_midpoints = config.geodesic_refine;

  std::vector<std::string> header = {"m"};
  std::vector<Eigen::VectorXd> columns;
  for (const std::string& name : split_list(methods_arg)) {
    const LandmarkMethod method = landmark_method_from_string(name);
    if (method == LandmarkMethod::Random) {
      const auto runs = static_cast<Eigen::Index>(config.random_seeds);
      Eigen::MatrixXd curves(static_cast<Eigen::Index>(m_max), runs);
      for (Eigen::Index s = 0; s < runs; ++s) {
        const LandmarkSet set = random_landmarks(mesh, config.landmarks, derive_seed(config.seed, static_cast<std::uint64_t>(s)));
        curves.col(s) = coverage_curve(mesh, observer.landmarks.indices, set.indices, m_max, geo).values;
      }
      const Eigen::VectorXd mean = curves.rowwise().mean();
      Eigen::VectorXd sd = Eigen::VectorXd::Zero(mean.size());
      if (runs > 1) {
        sd = ((curves.colwise() - mean).array().square().rowwise().sum() / static_cast<double>(runs - 1)).sqrt();
      }
      header.push_back("random_mean");
      header.push_back("random_sd");
      columns.push_back(mean);
      columns.push_back(sd);
    } else {
      const LandmarkSet set = generate(mesh, config, method, config.landmarks, std::nullopt, config.seed);
      if (set.size() < m_max) throw RangeError(name + " produced fewer than coverage_max landmarks");
      header.emplace_back(to_string(method));
      columns.push_back(coverage_curve(mesh, observer.landmarks.indices, set.indices, m_max, geo).values);
    }
    log_info("coverage curve for " + name + " done");
  }
  auto out = open_output(out_path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t m = 0; m < m_max; ++m) {
    out << m + 1;
    for (const auto& col : columns) out << ',' << col[static_cast<Eigen::Index>(m)];
    out << '\n';
  }
  return 0;
}

Eigen::VectorXd read_potential(const fs::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find_last_of(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      values.push_back(v);
    } catch (const std::logic_error&) {
      if (!first) throw ParseError("bad potential value '" + cell + "'");
    }
    first = false;
  }
  if (values.size() != n) {
    throw DimensionMismatchError("potential has " + std::to_string(values.size()) + " values for " +
                                 std::to_string(n) + " vertices");
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(n));
}

int cmd_eigs(const RunConfig& config, const std::string& mesh_path, const std::string& potential_path,
             const std::string& out_path, const std::string& values_path) {
  const TriMesh mesh = load_mesh(mesh_path);
  const VertexField potential{read_potential(potential_path, mesh.num_vertices()), FieldKind::Potential};
  const double range = potential.values.maxCoeff() - potential.values.minCoeff();
  const double eps = config.eps.value_or(range > 0.0 ? 0.05 * range : 1.0);
  const double t = config.bandwidth.value_or(default_bandwidth(mesh, config.bandwidth_fraction));
  log_info("Witten operator: eps " + std::to_string(eps) + ", bandwidth " + std::to_string(t));
  const WittenOperator op = witten_operator(mesh, potential, eps, t);
  const auto m = static_cast<Eigen::Index>(std::min<std::size_t>(config.eigs, mesh.num_vertices()));
  const EigenPairs pairs = localized_eigenfunctions(op, m);
  if (fs::path(out_path).extension() == ".bin") {
    write_matrix_binary(pairs.vectors, out_path);
  } else {
    auto out = open_output(out_path);
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << "vertex";
    for (Eigen::Index k = 0; k < m; ++k) out << ",phi_" << k + 1;
    out << '\n';
    for (Eigen::Index v = 0; v < pairs.vectors.rows(); ++v) {
      out << v;
      for (Eigen::Index k = 0; k < m; ++k) out << ',' << pairs.vectors(v, k);
      out << '\n';
    }
  }
  if (!values_path.empty()) {
    auto out = open_output(values_path);
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << "index,eigenvalue\n";
    for (Eigen::Index k = 0; k < m; ++k) out << k + 1 << ',' << pairs.values[k] << '\n';
  }
  return 0;
}

RegistrationParams registration_params(const RunConfig& config) {
  RegistrationParams p;
  p.landmarks = config.landmarks;
  p.method = config.method;
  p.kernel = config.kernel();
  p.candidates = config.candidates;
  p.wks.eigenpairs = config.wks_eigs;
  p.wks.energies = config.wks_energies;
  p.filter.kbound = config.kbound;
  p.filter.inlier_tolerance = config.inlier_tolerance;
  p.filter.seed = config.seed;
  p.param.max_iterations = config.param_iterations;
  p.allow_reflection = config.allow_reflection;
  return p;
}

void write_uv(const PlanarParam& p, const fs::path& path) {
  auto out = open_output(path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << "vertex,u,v\n";
  for (Eigen::Index i = 0; i < p.uv.rows(); ++i) out << i << ',' << p.uv(i, 0) << ',' << p.uv(i, 1) << '\n';
}

int cmd_match(const RunConfig& config, const std::string& mesh1_path, const std::string& mesh2_path,
              const std::string& out_dir, bool artifacts, bool print) {
  const TriMesh mesh1 = load_mesh(mesh1_path);
  const TriMesh mesh2 = load_mesh(mesh2_path);
  const RegistrationParams params = registration_params(config);
  auto prepare = [&](const TriMesh& mesh, const std::string& path) {
    try {
      PreparedSurface s = prepare_surface(mesh, params);
      log_info("prepared " + path);
      return s;
    } catch (Error& e) {
      e.add_context(path);
      throw;
    }
  };
  const PreparedSurface s1 = prepare(mesh1, mesh1_path);
  const PreparedSurface s2 = prepare(mesh2, mesh2_path);
  const RegistrationResult r = register_prepared(s1, s2, params);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "correspondences.csv");
    write_correspondences_csv(r.correspondences, out);
  }
  {
    auto out = open_output(dir / "map.csv");
    write_map_csv(r.map, out);
  }
  if (artifacts) {
    write_landmarks_csv(s1.landmarks, s1.mesh, dir / "landmarks1.csv");
    write_landmarks_csv(s2.landmarks, s2.mesh, dir / "landmarks2.csv");
    write_uv(s1.param, dir / "param1.csv");
    write_uv(s2.param, dir / "param2.csv");
  }
  std::size_t projected = 0;
  for (auto p : r.map.projected) projected += p;
  json summary;
  summary["mesh1"] = mesh1_path;
  summary["mesh2"] = mesh2_path;
  summary["L"] = r.correspondences.size();
  summary["landmarks1"] = r.source_landmarks;
  summary["landmarks2"] = r.target_landmarks;
  summary["kbound"] = r.correspondences.kbound;
  summary["candidates"] = config.candidates;
  summary["transform_distortion"] = r.correspondences.transform.conformal_distortion();
  summary["energies"] = {{"param1", r.source_param_energy},
                         {"param2", r.target_param_energy},
                         {"map", r.map.energy}};
  summary["projected_vertices"] = projected;
  summary["d_P"] = r.procrustes;
  summary["seed"] = config.seed;
  summary["config"] = config_json(config);
  write_json(summary, dir / "summary.json", print);
  log_info("matched " + std::to_string(r.correspondences.size()) + " landmarks, d_P = " + std::to_string(r.procrustes));
  return 0;
}

int cmd_distmat(const RunConfig& config, const std::string& dir, const std::string& out_path,
                const std::string& failures_path) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".off" || ext == ".ply" || ext == ".obj") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2) throw RangeError("distmat needs at least two meshes in " + dir);
  std::vector<TriMesh> meshes;
  std::vector<std::string> labels;
  for (const auto& f : files) {
    try {
      meshes.push_back(load_mesh(f));
    } catch (Error& e) {
      e.add_context(f.string());
      throw;
    }
    labels.push_back(f.stem().string());
  }
  log_info("registering " + std::to_string(meshes.size()) + " meshes with " + std::to_string(config.jobs) + " jobs");
  const DistanceMatrixRun run = registration_distance_matrix(meshes, labels, registration_params(config), config.jobs);
  {
    auto out = open_output(out_path);
    write_distance_csv(run.matrix, out);
  }
  if (!failures_path.empty()) {
    auto out = open_output(failures_path);
    out << "label1,label2,message\n";
    for (const auto& f : run.failures) {
      std::string msg = f.message;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << labels[f.i] << ',' << labels[f.j] << ',' << msg << '\n';
    }
  }
  if (!run.failures.empty()) log_warn(std::to_string(run.failures.size()) + " registrations failed; entries left missing");
  return 0;
}

json result_json(const TestResult& r, bool with_infinite) {
  json j;
  j["statistic"] = number_or_null(r.statistic);
  if (with_infinite) j["infinite"] = r.infinite;
  j["p"] = r.p_value;
  j["n_perm"] = r.permutations;
  j["exhaustive"] = r.exhaustive;
  j["seed"] = r.seed;
  return j;
}

int cmd_stats(const RunConfig& config, const std::string& matrix_path, const std::string& matrix2_path,
              const std::string& groups_path, const std::string& out_path, bool exhaustive, bool print) {
  if (matrix2_path.empty() && groups_path.empty()) throw ConfigError("stats needs --matrix2 and/or --groups");
  DistanceMatrix d1 = read_distance_csv(fs::path(matrix_path));
  PermutationOptions opts;
  opts.permutations = config.permutations;
  opts.seed = config.seed;
  opts.exhaustive = exhaustive;
  opts.jobs = config.jobs;
  json out;
  if (!matrix2_path.empty()) {
    const DistanceMatrix d2 = read_distance_csv(fs::path(matrix2_path));
    out["mantel"] = result_json(mantel_test(d1, d2, opts), false);
  }
  if (!groups_path.empty()) {
    read_groups_csv(fs::path(groups_path), d1);
    const std::vector<int> groups = group_indices(d1.groups);
    out["permanova"] = result_json(permanova(d1, groups, opts), true);
  }
  write_json(out, out_path, print);
  return 0;
}

int report(const Error& e) {
  std::cerr << "gplmk: " << e.name() << ": " << e.what() << '\n';
  return e.exit_code();
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Gaussian-process landmarking, registration and shape statistics"};
  app.name("gplmk");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, std::string("Config file (default: $") + kConfigEnv + ")");
  app.add_option("--set", g.sets, "Override a config entry, key=value (repeatable)");
  app.add_option("--seed", g.seed, "Global RNG seed");
  app.add_option("--jobs", g.jobs, "Worker threads");
  app.add_option("-L,--landmarks", g.landmarks, "Landmark count");
  app.add_option("--method", g.method, "gp | gp_nw | gp_euc | gfps | random");
  app.add_flag("-v,--verbose", g.verbose, "Debug logging");
  app.add_flag("-q,--quiet", g.quiet, "Warnings only");

  std::string mesh, mesh2, out, extra, extra2, extra3;
  std::string methods = "gp,gfps,random";
  std::optional<VertexId> seed_vertex;
  bool flag = false;
  bool print = false;

  auto* landmark = app.add_subcommand("landmark", "Select landmarks on a mesh");
  landmark->add_option("mesh", mesh, "Mesh file (OFF, PLY, OBJ)")->required();
  landmark->add_option("-o,--output", out, "Landmark CSV")->required();
  landmark->add_option("--seed-vertex", seed_vertex, "GFPS start vertex (default: first GP pick)");
  landmark->add_option("--kernel-out", extra, "Also write the covariance (.bin for binary, else CSV)");

  auto* coverage = app.add_subcommand("coverage", "Observer coverage curves");
  coverage->add_option("mesh", mesh, "Mesh file")->required();
  coverage->add_option("--observer", extra, "Observer landmarks (vertex CSV or x,y,z rows)")->required();
  coverage->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  coverage->add_option("-o,--output", out, "Curves CSV")->required();

  auto* eigs = app.add_subcommand("eigs", "Localized eigenfunctions of the normalized Witten operator");
  eigs->add_option("mesh", mesh, "Mesh file")->required();
  eigs->add_option("--potential", extra, "Potential, one value per vertex")->required();
  eigs->add_option("-o,--output", out, "Eigenvector CSV (.bin for binary)")->required();
  eigs->add_option("--values", extra2, "Eigenvalue CSV");

  auto* match = app.add_subcommand("match", "Register two disk-type surfaces");
  match->add_option("mesh1", mesh, "Source mesh")->required();
  match->add_option("mesh2", mesh2, "Target mesh")->required();
  match->add_option("-o,--out-dir", out, "Output directory")->required();
  match->add_flag("--artifacts", flag, "Also write landmarks and parametrizations");
  match->add_flag("--print", print, "Echo the summary JSON to stdout");

  auto* distmat = app.add_subcommand("distmat", "All-pairs registration distance matrix");
  distmat->add_option("dir", mesh, "Directory of meshes")->required();
  distmat->add_option("-o,--output", out, "Distance matrix CSV")->required();
  distmat->add_option("--failures", extra, "CSV of failed registrations");

  auto* stats = app.add_subcommand("stats", "Mantel test and PERMANOVA");
  stats->add_option("--matrix", extra, "Distance matrix CSV")->required();
  stats->add_option("--matrix2", extra2, "Second matrix for the Mantel test");
  stats->add_option("--groups", extra3, "label,group CSV for PERMANOVA");
  stats->add_option("-o,--output", out, "Result JSON")->required();
  stats->add_flag("--exhaustive", flag, "Enumerate all relabellings");
  stats->add_flag("--print", print, "Echo the JSON to stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  set_log_level(g.verbose ? LogLevel::Debug : (g.quiet ? LogLevel::Warning : LogLevel::Info));
  try {
    const RunConfig config = resolve_config(g);
    if (landmark->parsed()) return cmd_landmark(config, mesh, out, seed_vertex, extra);
    if (coverage->parsed()) return cmd_coverage(config, mesh, extra, methods, out);
    if (eigs->parsed()) return cmd_eigs(config, mesh, extra, out, extra2);
    if (match->parsed()) return cmd_match(config, mesh, mesh2, out, flag, print);
    if (distmat->parsed()) return cmd_distmat(config, mesh, out, extra);
    if (stats->parsed()) return cmd_stats(config, extra, extra2, extra3, out, flag, print);
  } catch (const Error& e) {
    return report(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gplmk: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "gplmk: internal failure: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace gplmk::cli
