#include "gplmk/evaluation/distance_matrix.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "gplmk/errors.hpp"
#include "gplmk/evaluation/procrustes.hpp"
#include "gplmk/log.hpp"
#include "gplmk/parallel.hpp"

namespace gplmk {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ls(line);
  std::string cell;
  while (std::getline(ls, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

bool DistanceMatrix::has_missing() const { return entries.hasNaN(); }

void DistanceMatrix::validate() const {
  const auto n = entries.rows();
  if (entries.cols() != n) throw RangeError("distance matrix must be square");
  if (labels.size() != static_cast<std::size_t>(n)) throw RangeError("one label per specimen required");
  if (!groups.empty() && groups.size() != labels.size()) throw RangeError("one group per specimen required");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries(i, i) != 0.0) throw RangeError("distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = entries(i, j);
      const double b = entries(j, i);
      if (std::isnan(a) || std::isnan(b)) {
        if (std::isnan(a) != std::isnan(b)) throw RangeError("missing entries must be symmetric");
        continue;
      }
      if (a < 0.0 || !std::isfinite(a)) throw RangeError("distances must be finite and nonnegative");
      if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) {
        throw RangeError("distance matrix is not symmetric");
      }
    }
  }
}

void write_distance_csv(const DistanceMatrix& d, std::ostream& out) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& label : d.labels) out << ',' << label;
  out << '\n';
  for (Eigen::Index i = 0; i < d.entries.rows(); ++i) {
    out << d.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d.entries.cols(); ++j) {
      out << ',';
      if (std::isnan(d.entries(i, j))) {
        out << "NA";
      } else {
        out << d.entries(i, j);
      }
    }
    out << '\n';
  }
}

DistanceMatrix read_distance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty distance matrix file");
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 2) throw ParseError("distance matrix header needs labels");
  DistanceMatrix d;
  d.labels.assign(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(d.labels.size());
  d.entries.resize(n, n);
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (row >= n) throw ParseError("distance matrix has more rows than labels");
    if (static_cast<Eigen::Index>(cells.size()) != n + 1) throw ParseError("distance matrix row has wrong length");
    if (cells[0] != d.labels[static_cast<std::size_t>(row)]) {
      throw ParseError("row label '" + cells[0] + "' does not match column order");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::string& cell = cells[static_cast<std::size_t>(j + 1)];
      if (cell == "NA" || cell == "nan" || cell == "NaN") {
        d.entries(row, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      try {
        std::size_t used = 0;
        d.entries(row, j) = std::stod(cell, &used);
        if (used != cell.size()) throw ParseError("bad distance '" + cell + "'");
      } catch (const std::logic_error&) {
        throw ParseError("bad distance '" + cell + "'");
      }
    }
    ++row;
  }
  if (row != n) throw ParseError("distance matrix has fewer rows than labels");
  d.validate();
  return d;
}

DistanceMatrix read_distance_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_distance_csv(in);
}

void read_groups_csv(std::istream& in, DistanceMatrix& d) {
  std::map<std::string, std::string> assignment;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) throw ParseError("group rows must be 'label,group'");
    if (first && cells[0] == "label" && cells[1] == "group") {
      first = false;
      continue;
    }
    first = false;
    if (!assignment.emplace(cells[0], cells[1]).second) throw ParseError("label '" + cells[0] + "' assigned twice");
  }
  d.groups.clear();
  for (const auto& label : d.labels) {
    auto it = assignment.find(label);
    if (it == assignment.end()) throw ParseError("no group for label '" + label + "'");
    d.groups.push_back(it->second);
  }
  if (assignment.size() != d.labels.size()) throw ParseError("group file names labels not in the matrix");
}

void read_groups_csv(const std::filesystem::path& path, DistanceMatrix& d) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  read_groups_csv(in, d);
}

std::vector<int> group_indices(const std::vector<std::string>& groups) {
  std::map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    auto it = ids.find(g);
    if (it == ids.end()) it = ids.emplace(g, static_cast<int>(ids.size())).first;
    out.push_back(it->second);
  }
  return out;
}

DistanceMatrixRun registration_distance_matrix(const std::vector<TriMesh>& meshes,
                                               const std::vector<std::string>& labels,
                                               const RegistrationParams& params, unsigned jobs) {
  const std::size_t n = meshes.size();
  if (n < 2) throw RangeError("distance matrix needs at least two meshes");
  if (labels.size() != n) throw DimensionMismatchError("one label per mesh required");

  std::vector<std::optional<PreparedSurface>> prepared(n);
  std::vector<std::string> prep_error(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    try {
      prepared[i] = prepare_surface(meshes[i], params);
    } catch (const Error& e) {
      prep_error[i] = e.what();
    }
  });

  // Ordered pairs (i, j), i != j, in row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) tasks.emplace_back(i, j);
    }
  }
  std::vector<double> value(tasks.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> error(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t k) {
    const auto [i, j] = tasks[k];
    if (!prepared[i] || !prepared[j]) {
      error[k] = !prepared[i] ? prep_error[i] : prep_error[j];
      return;
    }
    try {
      value[k] = register_prepared(*prepared[i], *prepared[j], params).procrustes;
    } catch (const Error& e) {
      error[k] = e.what();
    }
  });

  DistanceMatrixRun run;
  run.matrix.labels = labels;
  run.matrix.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd directed = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto [i, j] = tasks[k];
    directed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value[k];
    if (!error[k].empty()) {
      run.failures.push_back({i, j, error[k]});
      log_warn("registration " + labels[i] + " -> " + labels[j] + " failed: " + error[k]);
    }
  }
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(n); ++j) {
      const double d = 0.5 * (directed(i, j) + directed(j, i));
      run.matrix.entries(i, j) = run.matrix.entries(j, i) = d;
    }
  }
  return run;
}

DistanceMatrix landmark_distance_matrix(const std::vector<Eigen::MatrixX3d>& configurations,
                                        const std::vector<std::string>& labels, bool allow_reflection) {
  const std::size_t n = configurations.size();
  if (labels.size() != n) throw DimensionMismatchError("one label per configuration required");
  DistanceMatrix d;
  d.labels = labels;
  d.entries = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Averaging both directions keeps the matrix exactly symmetric.
      const double a = landmark_procrustes(configurations[i], configurations[j], allow_reflection);
      const double b = landmark_procrustes(configurations[j], configurations[i], allow_reflection);
      d.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          d.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 0.5 * (a + b);
    }
  }
  return d;
}

}  // namespace gplmk
