#include "aerochunk/primitives.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace aerochunk {

namespace {

TriangleMesh from_lists(const std::vector<Vec3>& pts, const std::vector<Eigen::Vector3i>& tris, std::string id) {
  TriangleMesh m;
  m.id = std::move(id);
  m.vertices.resize(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.vertices.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  m.faces.resize(static_cast<Eigen::Index>(tris.size()), 3);
  for (std::size_t f = 0; f < tris.size(); ++f) m.faces.row(static_cast<Eigen::Index>(f)) = tris[f].transpose();
  return m;
}

}  // namespace

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) {
    pts.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  }
  const std::vector<Eigen::Vector3i> tris = {
      {0, 2, 3}, {0, 3, 1},  // -z
      {4, 5, 7}, {4, 7, 6},  // +z
      {0, 1, 5}, {0, 5, 4},  // -y
      {2, 6, 7}, {2, 7, 3},  // +y
      {0, 4, 6}, {0, 6, 2},  // -x
      {1, 3, 7}, {1, 7, 5},  // +x
  };
  return from_lists(pts, tris, "box");
}

TriangleMesh make_unit_tetrahedron() {
  const std::vector<Vec3> pts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  const std::vector<Eigen::Vector3i> tris = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return from_lists(pts, tris, "tetrahedron");
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pts) p.normalize();
  std::vector<Eigen::Vector3i> tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      pts.push_back((pts[a] + pts[b]).normalized());
      const int idx = static_cast<int>(pts.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(tris.size() * 4);
    for (const auto& f : tris) {
      const int ab = midpoint(f[0], f[1]);
      const int bc = midpoint(f[1], f[2]);
      const int ca = midpoint(f[2], f[0]);
      next.emplace_back(f[0], ab, ca);
      next.emplace_back(f[1], bc, ab);
      next.emplace_back(f[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    tris = std::move(next);
  }
  for (auto& p : pts) p *= radius;
  return from_lists(pts, tris, "icosphere");
}

TriangleMesh make_hemisphere(double radius, int segments, int rings) {
  std::vector<Vec3> pts;
  std::vector<Eigen::Vector3i> tris;
  pts.emplace_back(0.0, 0.0, radius);
  for (int k = 1; k <= rings; ++k) {
    const double phi = 0.5 * std::numbers::pi * k / rings;
    // Pin the last ring exactly to z = 0 so the base disk is planar.
    const double z = k == rings ? 0.0 : radius * std::cos(phi);
    for (int j = 0; j < segments; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / segments;
      pts.emplace_back(radius * std::sin(phi) * std::cos(theta), radius * std::sin(phi) * std::sin(theta), z);
    }
  }
  const int center = static_cast<int>(pts.size());
  pts.emplace_back(0.0, 0.0, 0.0);
  auto ring = [&](int k, int j) { return 1 + (k - 1) * segments + (j % segments); };
  for (int j = 0; j < segments; ++j) tris.emplace_back(0, ring(1, j), ring(1, j + 1));
  for (int k = 1; k < rings; ++k) {
    for (int j = 0; j < segments; ++j) {
      const int a = ring(k, j), b = ring(k + 1, j), c = ring(k + 1, j + 1), d = ring(k, j + 1);
      tris.emplace_back(a, b, c);
      tris.emplace_back(a, c, d);
    }
  }
  for (int j = 0; j < segments; ++j) tris.emplace_back(center, ring(rings, j + 1), ring(rings, j));
  return from_lists(pts, tris, "hemisphere");
}

TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments, int minor_segments,
                        const Vec3& center) {
  std::vector<Vec3> pts;
  std::vector<Eigen::Vector3i> tris;
  for (int i = 0; i < major_segments; ++i) {
    const double u = 2.0 * std::numbers::pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      const double v = 2.0 * std::numbers::pi * j / minor_segments;
      const double rho = major_radius + minor_radius * std::cos(v);
      pts.push_back(center + Vec3(rho * std::cos(u), rho * std::sin(u), minor_radius * std::sin(v)));
    }
  }
  auto at = [&](int i, int j) { return (i % major_segments) * minor_segments + (j % minor_segments); };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      tris.emplace_back(at(i, j), at(i + 1, j), at(i + 1, j + 1));
      tris.emplace_back(at(i, j), at(i + 1, j + 1), at(i, j + 1));
    }
  }
  return from_lists(pts, tris, "torus");
}

TriangleMesh make_dome(double volume, int segments, int rings) {
  TriangleMesh unit = make_hemisphere(1.0, segments, rings);
  const double factor = std::cbrt(volume / mesh_volume(unit));
  TriangleMesh dome = scaled(unit, factor);
  dome.id = "dome";
  return dome;
}

}  // namespace aerochunk
