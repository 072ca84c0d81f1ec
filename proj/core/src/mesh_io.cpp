#include "gplmk/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gplmk/errors.hpp"

namespace gplmk {
namespace {

struct RawMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Triangle> triangles;
};

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Next non-empty, non-comment line; false at EOF.
bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

void add_polygon(RawMesh& raw, const std::vector<long long>& poly, std::size_t line_no) {
  if (poly.size() < 3) throw ParseError("face with fewer than 3 vertices near line " + std::to_string(line_no));
  const auto nv = static_cast<long long>(raw.vertices.size());
  for (long long idx : poly) {
    if (idx < 0 || idx >= nv) {
      throw ParseError("face references vertex " + std::to_string(idx) + " of " + std::to_string(nv) +
                       " near line " + std::to_string(line_no));
    }
  }
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    raw.triangles.push_back({static_cast<VertexId>(poly[0]), static_cast<VertexId>(poly[k]),
                             static_cast<VertexId>(poly[k + 1])});
  }
}

RawMesh parse_off(std::istream& in) {
  std::string line;
  if (!next_content_line(in, line)) throw ParseError("empty OFF file");
  std::istringstream header(line);
  std::string tag;
  header >> tag;
  std::string counts_line;
  if (tag == "OFF") {
    // Counts may follow on the same line.
    std::string rest;
    std::getline(header, rest);
    if (rest.find_first_not_of(" \t") != std::string::npos) {
      counts_line = rest;
    } else if (!next_content_line(in, counts_line)) {
      throw ParseError("OFF header without counts");
    }
  } else if (!tag.empty() && (std::isdigit(static_cast<unsigned char>(tag[0])) != 0)) {
    counts_line = line;
  } else {
    throw ParseError("not an OFF file (header '" + tag + "')");
  }
  std::istringstream counts(counts_line);
  long long nv = -1;
  long long nf = -1;
  if (!(counts >> nv >> nf) || nv < 0 || nf < 0) throw ParseError("bad OFF counts");

  RawMesh raw;
  raw.vertices.reserve(static_cast<std::size_t>(nv));
  std::size_t line_no = 2;
  for (long long i = 0; i < nv; ++i, ++line_no) {
    if (!next_content_line(in, line)) throw ParseError("unexpected end of OFF vertex block");
    std::istringstream ls(line);
    double x, y, z;
    if (!(ls >> x >> y >> z)) throw ParseError("bad OFF vertex near line " + std::to_string(line_no));
    raw.vertices.emplace_back(x, y, z);
  }
  for (long long i = 0; i < nf; ++i, ++line_no) {
    if (!next_content_line(in, line)) throw ParseError("unexpected end of OFF face block");
    std::istringstream ls(line);
    long long n = 0;
    if (!(ls >> n) || n < 3) throw ParseError("bad OFF face near line " + std::to_string(line_no));
    std::vector<long long> poly(static_cast<std::size_t>(n));
    for (auto& idx : poly) {
      if (!(ls >> idx)) throw ParseError("truncated OFF face near line " + std::to_string(line_no));
    }
    add_polygon(raw, poly, line_no);
  }
  return raw;
}

struct PlyElement {
  std::string name;
  long long count = 0;
  std::vector<std::string> properties;  // scalar names; list properties named "list:<name>"
};

RawMesh parse_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || lowercase(line).rfind("ply", 0) != 0) throw ParseError("missing 'ply' magic");
  std::vector<PlyElement> elements;
  bool ascii = false;
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("unterminated PLY header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = fmt == "ascii";
    } else if (kw == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) throw ParseError("PLY property before element");
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type, name;
        ls >> count_type >> item_type >> name;
        elements.back().properties.push_back("list:" + name);
      } else {
        std::string name;
        ls >> name;
        elements.back().properties.push_back(name);
      }
    } else if (kw == "end_header") {
      break;
    }
  }
  if (!ascii) throw ParseError("only ASCII PLY is supported");

  RawMesh raw;
  std::size_t line_no = 0;
  for (const PlyElement& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t p = 0; p < e.properties.size(); ++p) {
      if (e.properties[p] == "x") ix = static_cast<int>(p);
      if (e.properties[p] == "y") iy = static_cast<int>(p);
      if (e.properties[p] == "z") iz = static_cast<int>(p);
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) throw ParseError("PLY vertex element lacks x/y/z");
    for (long long i = 0; i < e.count; ++i) {
      ++line_no;
      if (!next_content_line(in, line)) throw ParseError("unexpected end of PLY body");
      std::istringstream ls(line);
      if (is_vertex) {
        Eigen::Vector3d p = Eigen::Vector3d::Zero();
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          if (e.properties[k].rfind("list:", 0) == 0) {
            long long n = 0;
            ls >> n;
            for (long long j = 0; j < n; ++j) {
              double skip;
              ls >> skip;
            }
            continue;
          }
          double value;
          if (!(ls >> value)) throw ParseError("bad PLY vertex record " + std::to_string(i));
          if (static_cast<int>(k) == ix) p.x() = value;
          if (static_cast<int>(k) == iy) p.y() = value;
          if (static_cast<int>(k) == iz) p.z() = value;
        }
        raw.vertices.push_back(p);
      } else if (is_face) {
        std::vector<long long> poly;
        for (const std::string& prop : e.properties) {
          if (prop == "list:vertex_indices" || prop == "list:vertex_index") {
            long long n = 0;
            if (!(ls >> n)) throw ParseError("bad PLY face record " + std::to_string(i));
            poly.resize(static_cast<std::size_t>(std::max(0LL, n)));
            for (auto& idx : poly) {
              if (!(ls >> idx)) throw ParseError("truncated PLY face record " + std::to_string(i));
            }
          } else if (prop.rfind("list:", 0) == 0) {
            long long n = 0;
            ls >> n;
            for (long long j = 0; j < n; ++j) {
              double skip;
              ls >> skip;
            }
          } else {
            double skip;
            ls >> skip;
          }
        }
        add_polygon(raw, poly, line_no);
      }
    }
  }
  return raw;
}

RawMesh parse_obj(std::istream& in) {
  RawMesh raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError("bad OBJ vertex at line " + std::to_string(line_no));
      raw.vertices.emplace_back(x, y, z);
    } else if (kw == "f") {
      std::vector<long long> poly;
      std::string token;
      while (ls >> token) {
        const std::string head = token.substr(0, token.find('/'));
        long long idx = 0;
        try {
          idx = std::stoll(head);
        } catch (const std::exception&) {
          throw ParseError("bad OBJ face token '" + token + "' at line " + std::to_string(line_no));
        }
        // OBJ is 1-based; negative indices count back from the latest vertex.
        idx = idx < 0 ? static_cast<long long>(raw.vertices.size()) + idx : idx - 1;
        poly.push_back(idx);
      }
      add_polygon(raw, poly, line_no);
    }
  }
  if (raw.vertices.empty()) throw ParseError("OBJ file has no vertices");
  return raw;
}

MeshFormat sniff(std::istream& in) {
  const auto pos = in.tellg();
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(pos);
  first = lowercase(first);
  if (first.rfind("ply", 0) == 0) return MeshFormat::Ply;
  if (first.rfind("off", 0) == 0) return MeshFormat::Off;
  return MeshFormat::Obj;
}

}  // namespace

MeshFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = lowercase(path.extension().string());
  if (ext == ".off") return MeshFormat::Off;
  if (ext == ".ply") return MeshFormat::Ply;
  if (ext == ".obj") return MeshFormat::Obj;
  return MeshFormat::Auto;
}

TriMesh read_mesh(std::istream& in, MeshFormat format) {
  if (format == MeshFormat::Auto) format = sniff(in);
  RawMesh raw;
  switch (format) {
    case MeshFormat::Off: raw = parse_off(in); break;
    case MeshFormat::Ply: raw = parse_ply(in); break;
    case MeshFormat::Obj: raw = parse_obj(in); break;
    case MeshFormat::Auto: break;
  }
  return TriMesh(std::move(raw.vertices), std::move(raw.triangles));
}

TriMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  if (format == MeshFormat::Auto) format = format_from_extension(path);
  return read_mesh(in, format);
}

void write_off(const TriMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_off(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_off(mesh, out);
}

}  // namespace gplmk
