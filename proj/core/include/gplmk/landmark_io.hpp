#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gplmk/landmarks.hpp"
#include "gplmk/mesh.hpp"

namespace gplmk {

// Header: ordinal,vertex,x,y,z,score,method
void write_landmarks_csv(const LandmarkSet& landmarks, const TriMesh& mesh, std::ostream& out);
void write_landmarks_csv(const LandmarkSet& landmarks, const TriMesh& mesh, const std::filesystem::path& path);

struct LandmarkReadResult {
  LandmarkSet landmarks;
  // Snap distance per landmark when the file held coordinates; empty otherwise.
  std::vector<double> snap_distances;
};

// Reads either a file produced by write_landmarks_csv (vertex column is used
// verbatim) or a bare coordinate list "x,y,z" per line (optionally with that
// header), whose points are snapped to the nearest vertex of `mesh`.
LandmarkReadResult read_landmarks_csv(std::istream& in, const TriMesh& mesh);
LandmarkReadResult read_landmarks_csv(const std::filesystem::path& path, const TriMesh& mesh);

}  // namespace gplmk
