#include "gplmk/landmark_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "gplmk/errors.hpp"

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
  return cells;
}

double to_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad number '" + s + "'");
  }
}

}  // namespace

void write_landmarks_csv(const LandmarkSet& landmarks, const TriMesh& mesh, std::ostream& out) {
  out << "ordinal,vertex,x,y,z,score,method\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < landmarks.indices.size(); ++i) {
    const VertexId v = landmarks.indices[i];
    const Eigen::Vector3d& p = mesh.vertex(v);
    const double score = i < landmarks.scores.size() ? landmarks.scores[i] : 0.0;
    out << i + 1 << ',' << v << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << score << ','
        << to_string(landmarks.method) << '\n';
  }
}

void write_landmarks_csv(const LandmarkSet& landmarks, const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_landmarks_csv(landmarks, mesh, out);
}

LandmarkReadResult read_landmarks_csv(std::istream& in, const TriMesh& mesh) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(split_csv(line));
  }
  if (rows.empty()) throw ParseError("empty landmark file");

  LandmarkReadResult result;
  const auto& head = rows.front();
  const auto column = [&](const std::string& name) -> std::ptrdiff_t {
    auto it = std::find(head.begin(), head.end(), name);
    return it == head.end() ? -1 : it - head.begin();
  };

  const std::ptrdiff_t vcol = column("vertex");
  if (vcol >= 0) {
    const std::ptrdiff_t scol = column("score");
    const std::ptrdiff_t mcol = column("method");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (static_cast<std::ptrdiff_t>(row.size()) <= vcol) throw ParseError("short landmark row");
      const double v = to_double(row[static_cast<std::size_t>(vcol)]);
      if (v < 0 || v >= static_cast<double>(mesh.num_vertices()) || v != std::floor(v)) {
        throw RangeError("landmark vertex " + row[static_cast<std::size_t>(vcol)] + " not on mesh");
      }
      result.landmarks.indices.push_back(static_cast<VertexId>(v));
      result.landmarks.scores.push_back(scol >= 0 && static_cast<std::ptrdiff_t>(row.size()) > scol
                                            ? to_double(row[static_cast<std::size_t>(scol)])
                                            : 0.0);
      if (r == 1 && mcol >= 0 && static_cast<std::ptrdiff_t>(row.size()) > mcol) {
        result.landmarks.method = landmark_method_from_string(row[static_cast<std::size_t>(mcol)]);
      }
    }
  } else {
    std::size_t first = 0;
    if (column("x") >= 0) first = 1;
    std::vector<Eigen::Vector3d> points;
    for (std::size_t r = first; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (row.size() < 3) throw ParseError("coordinate landmark rows need x,y,z");
      points.emplace_back(to_double(row[0]), to_double(row[1]), to_double(row[2]));
    }
    VertexSnap snap = snap_to_vertices(mesh, points);
    result.landmarks.indices = std::move(snap.indices);
    result.landmarks.scores.assign(result.landmarks.indices.size(), 0.0);
    result.landmarks.method = LandmarkMethod::Observer;
    result.snap_distances = std::move(snap.distances);
  }
  return result;
}

LandmarkReadResult read_landmarks_csv(const std::filesystem::path& path, const TriMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_landmarks_csv(in, mesh);
}

}  // namespace gplmk
