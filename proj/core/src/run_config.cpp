#include "gplmk/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "gplmk/errors.hpp"

namespace gplmk {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("config key '" + std::string(key) + "' = '" + std::string(value) + "': " + std::string(why));
}

double as_double(std::string_view key, std::string_view value) {
  std::istringstream in{std::string(value)};
  double x = 0.0;
  in >> x;
  if (!in || !in.eof()) bad(key, value, "expected a number");
  if (!std::isfinite(x)) bad(key, value, "must be finite");
  return x;
}

std::uint64_t as_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t x = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, x);
  if (ec != std::errc() || ptr != end) bad(key, value, "expected a nonnegative integer");
  return x;
}

bool as_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad(key, value, "expected true or false");
}

std::string number(double x) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << x;
  return out.str();
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "bandwidth") {
    if (value == "auto") {
      bandwidth.reset();
    } else {
      bandwidth = as_double(key, value);
    }
  } else if (key == "bandwidth_fraction") {
    bandwidth_fraction = as_double(key, value);
  } else if (key == "lambda") {
    weights.lambda = as_double(key, value);
  } else if (key == "rho") {
    weights.rho = as_double(key, value);
  } else if (key == "landmarks") {
    landmarks = as_unsigned(key, value);
  } else if (key == "method") {
    method = landmark_method_from_string(value);
  } else if (key == "candidates") {
    candidates = as_unsigned(key, value);
  } else if (key == "kbound") {
    kbound = as_double(key, value);
  } else if (key == "inlier_tolerance") {
    inlier_tolerance = as_double(key, value);
  } else if (key == "wks_eigs") {
    wks_eigs = as_unsigned(key, value);
  } else if (key == "wks_energies") {
    wks_energies = as_unsigned(key, value);
  } else if (key == "param_iterations") {
    param_iterations = static_cast<int>(as_unsigned(key, value));
  } else if (key == "permutations") {
    permutations = as_unsigned(key, value);
  } else if (key == "seed") {
    seed = as_unsigned(key, value);
  } else if (key == "jobs") {
    jobs = static_cast<unsigned>(as_unsigned(key, value));
  } else if (key == "allow_reflection") {
    allow_reflection = as_bool(key, value);
  } else if (key == "random_seeds") {
    random_seeds = as_unsigned(key, value);
  } else if (key == "coverage_max") {
    coverage_max = as_unsigned(key, value);
  } else if (key == "geodesic_refine") {
    geodesic_refine = as_bool(key, value);
  } else if (key == "eps") {
    if (value == "auto") {
      eps.reset();
    } else {
      eps = as_double(key, value);
    }
  } else if (key == "eigs") {
    eigs = as_unsigned(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  if (bandwidth && !(*bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!(bandwidth_fraction > 0.0)) throw ConfigError("bandwidth_fraction must be positive");
  try {
    weights.validate();
  } catch (const RangeError& e) {
    throw ConfigError(e.what());
  }
  if (landmarks < 1) throw ConfigError("landmarks must be at least 1");
  if (candidates < 1) throw ConfigError("candidates must be at least 1");
  if (!(kbound >= 1.0)) throw ConfigError("kbound must be at least 1");
  if (!(inlier_tolerance > 0.0)) throw ConfigError("inlier_tolerance must be positive");
  if (wks_eigs < 2 || wks_energies < 1) throw ConfigError("wks_eigs must be >= 2 and wks_energies >= 1");
  if (param_iterations < 1) throw ConfigError("param_iterations must be at least 1");
  if (permutations < 1) throw ConfigError("permutations must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (random_seeds < 1) throw ConfigError("random_seeds must be at least 1");
  if (eps && !(*eps > 0.0)) throw ConfigError("eps must be positive");
  if (eigs < 1) throw ConfigError("eigs must be at least 1");
}

KernelConfig RunConfig::kernel() const {
  KernelConfig k;
  k.variant = kernel_variant_for(method);
  k.bandwidth = bandwidth;
  k.bandwidth_fraction = bandwidth_fraction;
  k.weights = weights;
  return k;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "bandwidth = " << (bandwidth ? number(*bandwidth) : "auto") << '\n'
      << "bandwidth_fraction = " << number(bandwidth_fraction) << '\n'
      << "lambda = " << number(weights.lambda) << '\n'
      << "rho = " << number(weights.rho) << '\n'
      << "landmarks = " << landmarks << '\n'
      << "method = " << to_string(method) << '\n'
      << "candidates = " << candidates << '\n'
      << "kbound = " << number(kbound) << '\n'
      << "inlier_tolerance = " << number(inlier_tolerance) << '\n'
      << "wks_eigs = " << wks_eigs << '\n'
      << "wks_energies = " << wks_energies << '\n'
      << "param_iterations = " << param_iterations << '\n'
      << "permutations = " << permutations << '\n'
      << "seed = " << seed << '\n'
      << "jobs = " << jobs << '\n'
      << "allow_reflection = " << (allow_reflection ? "true" : "false") << '\n'
      << "random_seeds = " << random_seeds << '\n'
      << "coverage_max = " << coverage_max << '\n'
      << "geodesic_refine = " << (geodesic_refine ? "true" : "false") << '\n'
      << "eps = " << (eps ? number(*eps) : "auto") << '\n'
      << "eigs = " << eigs << '\n';
  return out.str();
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    config.set(view.substr(0, eq), view.substr(eq + 1));
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in);
}

}  // namespace gplmk
