#include "aerochunk/mesh_io.hpp"

#include "aerochunk/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace aerochunk {

namespace {

static_assert(std::endian::native == std::endian::little, "binary STL I/O assumes a little-endian host");

constexpr std::size_t kStlHeaderBytes = 80;
constexpr std::size_t kStlRecordBytes = 50;

struct Soup {
  std::vector<Vec3> points;
  std::vector<Eigen::Vector3i> triangles;

  void add_triangle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const int base = static_cast<int>(points.size());
    points.push_back(a);
    points.push_back(b);
    points.push_back(c);
    triangles.emplace_back(base, base + 1, base + 2);
  }
};

Soup parse_stl_binary(std::string_view bytes) {
  if (bytes.size() < kStlHeaderBytes + 4) throw ParseError("binary STL shorter than its 84-byte header");
  std::uint32_t count = 0;
  std::memcpy(&count, bytes.data() + kStlHeaderBytes, 4);
  const std::size_t expected = kStlHeaderBytes + 4 + static_cast<std::size_t>(count) * kStlRecordBytes;
  if (bytes.size() < expected) {
    throw ParseError(fmt::format("binary STL declares {} triangles but holds only {} bytes", count, bytes.size()));
  }
  Soup soup;
  soup.points.reserve(3 * count);
  const char* rec = bytes.data() + kStlHeaderBytes + 4;
  for (std::uint32_t t = 0; t < count; ++t, rec += kStlRecordBytes) {
    float xyz[9];
    std::memcpy(xyz, rec + 12, sizeof(xyz));
    soup.add_triangle(Vec3(xyz[0], xyz[1], xyz[2]), Vec3(xyz[3], xyz[4], xyz[5]), Vec3(xyz[6], xyz[7], xyz[8]));
  }
  return soup;
}

Soup parse_stl_ascii(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string token;
  in >> token;
  if (token != "solid") throw ParseError("ASCII STL must start with 'solid'");
  std::getline(in, token);
  Soup soup;
  std::vector<Vec3> loop;
  std::size_t line_no = 1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "vertex") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError(fmt::format("ASCII STL line {}: malformed vertex", line_no));
      loop.emplace_back(x, y, z);
    } else if (kw == "endloop") {
      if (loop.size() != 3) {
        throw ParseError(fmt::format("ASCII STL line {}: facet has {} vertices, expected 3", line_no, loop.size()));
      }
      soup.add_triangle(loop[0], loop[1], loop[2]);
      loop.clear();
    } else if (kw == "facet" || kw == "outer" || kw == "endfacet" || kw == "endsolid" || kw == "solid") {
      continue;
    } else {
      throw ParseError(fmt::format("ASCII STL line {}: unexpected keyword '{}'", line_no, kw));
    }
  }
  if (!loop.empty()) throw ParseError("ASCII STL ends inside an unterminated facet");
  return soup;
}

Soup parse_obj(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  Soup soup;
  std::vector<std::vector<int>> polygons;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError(fmt::format("OBJ line {}: malformed vertex", line_no));
      soup.points.emplace_back(x, y, z);
    } else if (kw == "f") {
      std::vector<int> poly;
      std::string ref;
      while (ls >> ref) {
        // Accept v, v/vt, v//vn, v/vt/vn; only the position index matters.
        const std::string head = ref.substr(0, ref.find('/'));
        int idx = 0;
        try {
          idx = std::stoi(head);
        } catch (const std::exception&) {
          throw ParseError(fmt::format("OBJ line {}: bad face index '{}'", line_no, ref));
        }
        if (idx < 0) idx = static_cast<int>(soup.points.size()) + idx + 1;
        poly.push_back(idx - 1);
      }
      if (poly.size() < 3) throw ParseError(fmt::format("OBJ line {}: face with fewer than 3 vertices", line_no));
      polygons.push_back(std::move(poly));
    }
    // Other records (vn, vt, g, o, s, usemtl, ...) are ignored.
  }
  for (const auto& poly : polygons) {
    for (int idx : poly) {
      if (idx < 0 || idx >= static_cast<int>(soup.points.size())) {
        throw ParseError(fmt::format("OBJ face references vertex {} of {}", idx + 1, soup.points.size()));
      }
    }
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) soup.triangles.emplace_back(poly[0], poly[k], poly[k + 1]);
  }
  return soup;
}

bool iequals_suffix(const std::string& s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

}  // namespace

MeshFormat parse_mesh_format(std::string_view name) {
  if (name == "stl-binary") return MeshFormat::StlBinary;
  if (name == "stl-ascii") return MeshFormat::StlAscii;
  if (name == "obj") return MeshFormat::Obj;
  throw ParseError(fmt::format("unknown mesh format '{}' (expected stl-binary, stl-ascii or obj)", name));
}

TriangleMesh load_mesh(std::string_view bytes, MeshFormat format) {
  Soup soup;
  switch (format) {
    case MeshFormat::StlBinary: soup = parse_stl_binary(bytes); break;
    case MeshFormat::StlAscii: soup = parse_stl_ascii(bytes); break;
    case MeshFormat::Obj: soup = parse_obj(bytes); break;
  }
  if (soup.triangles.empty()) throw ParseError("mesh file contains no triangles");
  TriangleMesh mesh = weld_vertices(soup.points, soup.triangles, kPlaneSnapTolerance);
  validate_mesh(mesh);
  return mesh;
}

MeshFormat detect_format(const std::filesystem::path& path, std::string_view bytes) {
  const std::string name = path.filename().string();
  if (iequals_suffix(name, ".obj")) return MeshFormat::Obj;
  if (bytes.size() >= kStlHeaderBytes + 4) {
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + kStlHeaderBytes, 4);
    if (bytes.size() == kStlHeaderBytes + 4 + static_cast<std::size_t>(count) * kStlRecordBytes) {
      return MeshFormat::StlBinary;
    }
  }
  if (bytes.substr(0, 5) == "solid") return MeshFormat::StlAscii;
  if (iequals_suffix(name, ".stl")) return MeshFormat::StlBinary;
  throw ParseError(fmt::format("cannot determine mesh format of '{}'", path.string()));
}

TriangleMesh load_mesh_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  TriangleMesh mesh = load_mesh(bytes, detect_format(path, bytes));
  mesh.id = path.stem().string();
  return mesh;
}

TriangleMesh load_mesh_file(const std::filesystem::path& path, MeshFormat format) {
  TriangleMesh mesh = load_mesh(read_file(path), format);
  mesh.id = path.stem().string();
  return mesh;
}

std::string to_stl_binary(const TriangleMesh& mesh) {
  std::string out(kStlHeaderBytes + 4 + static_cast<std::size_t>(mesh.num_faces()) * kStlRecordBytes, '\0');
  const std::string header = fmt::format("aerochunk chunk {}", mesh.id);
  std::memcpy(out.data(), header.data(), std::min(header.size(), kStlHeaderBytes));
  const auto count = static_cast<std::uint32_t>(mesh.num_faces());
  std::memcpy(out.data() + kStlHeaderBytes, &count, 4);
  char* rec = out.data() + kStlHeaderBytes + 4;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f, rec += kStlRecordBytes) {
    const Vec3 n = face_normal(mesh, f);
    float buf[12];
    for (int k = 0; k < 3; ++k) buf[k] = static_cast<float>(n[k]);
    for (int c = 0; c < 3; ++c) {
      const Vec3 p = mesh.corner(f, c);
      for (int k = 0; k < 3; ++k) buf[3 + 3 * c + k] = static_cast<float>(p[k]);
    }
    std::memcpy(rec, buf, sizeof(buf));
  }
  return out;
}

std::string to_stl_ascii(const TriangleMesh& mesh) {
  std::string out = fmt::format("solid {}\n", mesh.id);
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    const Vec3 n = face_normal(mesh, f);
    out += fmt::format("  facet normal {} {} {}\n    outer loop\n", n.x(), n.y(), n.z());
    for (int c = 0; c < 3; ++c) {
      const Vec3 p = mesh.corner(f, c);
      out += fmt::format("      vertex {} {} {}\n", p.x(), p.y(), p.z());
    }
    out += "    endloop\n  endfacet\n";
  }
  out += fmt::format("endsolid {}\n", mesh.id);
  return out;
}

std::string to_obj(const TriangleMesh& mesh) {
  std::string out;
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
    out += fmt::format("v {} {} {}\n", mesh.vertices(i, 0), mesh.vertices(i, 1), mesh.vertices(i, 2));
  }
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    out += fmt::format("f {} {} {}\n", mesh.faces(f, 0) + 1, mesh.faces(f, 1) + 1, mesh.faces(f, 2) + 1);
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError(fmt::format("failed writing '{}'", path.string()));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace aerochunk
