#pragma once

#include "aerochunk/mesh.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace aerochunk {

enum class MeshFormat { StlBinary, StlAscii, Obj };

/// Parse mesh bytes, weld vertices within 1e-7 m and validate. Throws ParseError on malformed
/// input and MeshError / NonWatertightError on invariant failures.
TriangleMesh load_mesh(std::string_view bytes, MeshFormat format);

/// Guess the format from the extension, then from the content (binary STL size check).
MeshFormat detect_format(const std::filesystem::path& path, std::string_view bytes);

TriangleMesh load_mesh_file(const std::filesystem::path& path);
TriangleMesh load_mesh_file(const std::filesystem::path& path, MeshFormat format);

/// Little-endian binary STL with a fixed header so output is byte-reproducible.
std::string to_stl_binary(const TriangleMesh& mesh);
std::string to_stl_ascii(const TriangleMesh& mesh);
std::string to_obj(const TriangleMesh& mesh);

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

MeshFormat parse_mesh_format(std::string_view name);

}  // namespace aerochunk
