#include "aerochunk/mesh.hpp"

#include "aerochunk/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace aerochunk {

namespace {

struct CellKey {
  long long x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
    h ^= static_cast<std::size_t>(k.y) * 19349663u;
    h ^= static_cast<std::size_t>(k.z) * 83492791u;
    return h;
  }
};

}  // namespace

TriangleMesh weld_vertices(const std::vector<Vec3>& points, const std::vector<Eigen::Vector3i>& triangles,
                           double tolerance) {
  const double cell = tolerance > 0.0 ? tolerance : 1e-12;
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
  std::vector<Vec3> unique;
  std::vector<int> remap(points.size(), -1);

  auto key_of = [&](const Vec3& p) {
    return CellKey{static_cast<long long>(std::floor(p.x() / cell)),
                   static_cast<long long>(std::floor(p.y() / cell)),
                   static_cast<long long>(std::floor(p.z() / cell))};
  };

  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& p = points[i];
    const CellKey k = key_of(p);
    int found = -1;
    for (long long dx = -1; dx <= 1 && found < 0; ++dx) {
      for (long long dy = -1; dy <= 1 && found < 0; ++dy) {
        for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find(CellKey{k.x + dx, k.y + dy, k.z + dz});
          if (it == grid.end()) continue;
          for (int cand : it->second) {
            if ((unique[cand] - p).norm() <= tolerance) {
              found = cand;
              break;
            }
          }
        }
      }
    }
    if (found < 0) {
      found = static_cast<int>(unique.size());
      unique.push_back(p);
      grid[k].push_back(found);
    }
    remap[i] = found;
  }

  std::vector<Eigen::Vector3i> kept;
  kept.reserve(triangles.size());
  for (const auto& t : triangles) {
    const Eigen::Vector3i r(remap.at(t[0]), remap.at(t[1]), remap.at(t[2]));
    if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
    kept.push_back(r);
  }

  // Compact: keep vertices in first-use order so output is independent of unused input.
  std::vector<int> compact(unique.size(), -1);
  TriangleMesh mesh;
  mesh.faces.resize(static_cast<Eigen::Index>(kept.size()), 3);
  std::vector<Vec3> used;
  for (std::size_t f = 0; f < kept.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int& slot = compact[kept[f][k]];
      if (slot < 0) {
        slot = static_cast<int>(used.size());
        used.push_back(unique[kept[f][k]]);
      }
      mesh.faces(static_cast<Eigen::Index>(f), k) = slot;
    }
  }
  mesh.vertices.resize(static_cast<Eigen::Index>(used.size()), 3);
  for (std::size_t i = 0; i < used.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = used[i].transpose();
  return mesh;
}

std::vector<std::pair<int, int>> boundary_edges(const TriangleMesh& mesh) {
  std::map<std::pair<int, int>, int> directed;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      ++directed[{mesh.faces(f, k), mesh.faces(f, (k + 1) % 3)}];
    }
  }
  std::vector<std::pair<int, int>> bad;
  for (const auto& [edge, count] : directed) {
    auto opposite = directed.find({edge.second, edge.first});
    const int opposite_count = opposite == directed.end() ? 0 : opposite->second;
    if (count != 1 || opposite_count != 1) bad.push_back(edge);
  }
  return bad;
}

void validate_mesh(const TriangleMesh& mesh) {
  if (mesh.empty()) throw MeshError("mesh has no faces");
  const Eigen::Index n = mesh.num_vertices();
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int idx = mesh.faces(f, k);
      if (idx < 0 || idx >= n) {
        throw MeshError(fmt::format("face {} references vertex {} out of range [0, {})", f, idx, n));
      }
    }
  }
  auto bad = boundary_edges(mesh);
  if (!bad.empty()) {
    std::string listing;
    const std::size_t shown = std::min<std::size_t>(bad.size(), 16);
    for (std::size_t i = 0; i < shown; ++i) {
      listing += fmt::format("{}({},{})", i ? " " : "", bad[i].first, bad[i].second);
    }
    if (shown < bad.size()) listing += fmt::format(" ... (+{} more)", bad.size() - shown);
    std::string what = fmt::format("mesh '{}' is not watertight: {} boundary edges: {}", mesh.id, bad.size(), listing);
    throw NonWatertightError(std::move(what), std::move(bad));
  }
  const double v = mesh_volume(mesh);
  if (!(v > 0.0)) {
    throw MeshError(fmt::format("mesh '{}' has non-positive volume {} (inverted or flat)", mesh.id, v));
  }
}

double mesh_volume(const TriangleMesh& mesh) { return signed_volume(mesh.vertices, mesh.faces); }

double surface_area(const TriangleMesh& mesh) {
  double area = 0.0;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    area += 0.5 * (mesh.corner(f, 1) - mesh.corner(f, 0)).cross(mesh.corner(f, 2) - mesh.corner(f, 0)).norm();
  }
  return area;
}

Vec3 face_normal(const TriangleMesh& mesh, Eigen::Index f) {
  const Vec3 n = (mesh.corner(f, 1) - mesh.corner(f, 0)).cross(mesh.corner(f, 2) - mesh.corner(f, 0));
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

Eigen::AlignedBox3d bounding_box(const TriangleMesh& mesh) {
  Eigen::AlignedBox3d box;
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) box.extend(mesh.vertex(i));
  return box;
}

ProjectionInterval project_interval(const TriangleMesh& mesh, const Vec3& normal) {
  if (mesh.num_vertices() == 0) return {};
  const auto [lo, hi] = projection_interval(mesh.vertices, normal);
  return {lo, hi};
}

TriangleMesh scaled(const TriangleMesh& mesh, double factor) {
  TriangleMesh out = mesh;
  out.vertices *= factor;
  return out;
}

}  // namespace aerochunk
