#pragma once

#include <filesystem>
#include <iosfwd>

#include "gplmk/mesh.hpp"

namespace gplmk {

enum class MeshFormat { Auto, Off, Ply, Obj };

// Guesses the format from the file extension (.off/.ply/.obj, case-insensitive).
MeshFormat format_from_extension(const std::filesystem::path& path);

// Reads a mesh. Polygonal faces are fan-triangulated; indices become 0-based.
// Throws ParseError on malformed input and TopologyError/DegenerateTriangleError
// when the parsed mesh fails validation.
TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format = MeshFormat::Auto);
TriMesh read_mesh(std::istream& in, MeshFormat format);

void write_off(const TriMesh& mesh, std::ostream& out);
void write_off(const TriMesh& mesh, const std::filesystem::path& path);

}  // namespace gplmk
