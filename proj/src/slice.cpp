#include "aerochunk/slice.hpp"

#include "aerochunk/triangulate.hpp"

#include <array>
#include <cmath>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace aerochunk {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Close the planar boundary of one side with triangulated caps facing `cap_normal`.
void cap_side(std::vector<Eigen::Vector3i>& faces, const std::vector<Vec3>& pts, const std::vector<char>& on_plane,
              const Vec3& cap_normal) {
  std::unordered_set<std::uint64_t> directed;
  directed.reserve(faces.size() * 3);
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) directed.insert(edge_key(f[k], f[(k + 1) % 3]));
  }
  // Cap edges run opposite to the unmatched side edges; keyed by start vertex for chaining.
  std::map<int, std::vector<int>> cap_edges;
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      const int u = f[k];
      const int v = f[(k + 1) % 3];
      if (!on_plane[u] || !on_plane[v]) continue;
      if (directed.count(edge_key(v, u))) continue;
      cap_edges[v].push_back(u);
    }
  }
  if (cap_edges.empty()) return;

  std::vector<Ring> loops;
  for (auto& [start, targets] : cap_edges) {
    while (!targets.empty()) {
      Ring loop{start};
      int cur = targets.back();
      targets.pop_back();
      while (cur != start) {
        loop.push_back(cur);
        auto it = cap_edges.find(cur);
        if (it == cap_edges.end() || it->second.empty()) break;  // open chain, leave as is
        const int next = it->second.back();
        it->second.pop_back();
        cur = next;
      }
      if (cur == start && loop.size() >= 3) loops.push_back(std::move(loop));
    }
  }

  const auto [u_axis, v_axis] = plane_basis(cap_normal);
  std::vector<Vec2> pts2;
  std::unordered_map<int, int> local;
  std::vector<int> global;
  std::vector<Ring> rings;
  for (const Ring& loop : loops) {
    Ring r;
    r.reserve(loop.size());
    for (int g : loop) {
      auto [it, inserted] = local.try_emplace(g, static_cast<int>(pts2.size()));
      if (inserted) {
        pts2.emplace_back(pts[g].dot(u_axis), pts[g].dot(v_axis));
        global.push_back(g);
      }
      r.push_back(it->second);
    }
    rings.push_back(std::move(r));
  }
  for (const auto& t : triangulate_rings(pts2, rings)) {
    faces.emplace_back(global[t[0]], global[t[1]], global[t[2]]);
  }
}

TriangleMesh compact(const std::vector<Eigen::Vector3i>& faces, const std::vector<Vec3>& pts, const std::string& id) {
  std::vector<int> remap(pts.size(), -1);
  TriangleMesh mesh;
  mesh.id = id;
  mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  std::vector<int> order;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int& slot = remap[faces[f][k]];
      if (slot < 0) {
        slot = static_cast<int>(order.size());
        order.push_back(faces[f][k]);
      }
      mesh.faces(static_cast<Eigen::Index>(f), k) = slot;
    }
  }
  mesh.vertices.resize(static_cast<Eigen::Index>(order.size()), 3);
  for (std::size_t i = 0; i < order.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = pts[order[i]].transpose();
  return mesh;
}

}  // namespace

SliceResult slice_mesh(const TriangleMesh& mesh, const CutPlane& plane, const SliceOptions& options) {
  const Vec3 n = plane.normal;
  const auto count = static_cast<std::size_t>(mesh.num_vertices());
  std::vector<Vec3> pts(count);
  std::vector<double> dist(count);
  std::vector<int> sign(count);
  bool has_neg = false;
  bool has_pos = false;
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 v = mesh.vertex(static_cast<Eigen::Index>(i));
    const double d = plane.signed_distance(v);
    if (std::abs(d) <= options.snap_tolerance) {
      pts[i] = v - d * n;
      dist[i] = 0.0;
      sign[i] = 0;
    } else {
      pts[i] = v;
      dist[i] = d;
      sign[i] = d < 0.0 ? -1 : 1;
      (d < 0.0 ? has_neg : has_pos) = true;
    }
  }

  SliceResult result;
  if (!has_neg || !has_pos) {
    result.status = SliceStatus::Miss;
    (has_neg ? result.negative : result.positive) = mesh;
    return result;
  }

  std::vector<char> on_plane(count);
  for (std::size_t i = 0; i < count; ++i) on_plane[i] = sign[i] == 0;

  std::unordered_map<std::uint64_t, int> crossing;
  auto edge_point = [&](int a, int b) {
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    auto [it, inserted] = crossing.try_emplace(edge_key(lo, hi), static_cast<int>(pts.size()));
    if (inserted) {
      const double t = dist[lo] / (dist[lo] - dist[hi]);
      Vec3 p = pts[lo] + t * (pts[hi] - pts[lo]);
      p -= plane.signed_distance(p) * n;
      pts.push_back(p);
      on_plane.push_back(1);
    }
    return it->second;
  };

  std::array<std::vector<Eigen::Vector3i>, 2> side;  // 0: negative, 1: positive
  auto side_of = [](int s) { return s < 0 ? 0 : 1; };
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    std::array<int, 3> v{mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    std::array<int, 3> s{sign[v[0]], sign[v[1]], sign[v[2]]};
    const bool any_neg = s[0] < 0 || s[1] < 0 || s[2] < 0;
    const bool any_pos = s[0] > 0 || s[1] > 0 || s[2] > 0;
    if (!any_neg && !any_pos) {
      // Face lies in the plane: it bounds whichever side its outward normal faces away from.
      const Vec3 fn = (pts[v[1]] - pts[v[0]]).cross(pts[v[2]] - pts[v[0]]);
      side[fn.dot(n) > 0.0 ? 0 : 1].emplace_back(v[0], v[1], v[2]);
      continue;
    }
    if (!any_pos || !any_neg) {
      side[any_neg ? 0 : 1].emplace_back(v[0], v[1], v[2]);
      continue;
    }
    const int zeros = (s[0] == 0) + (s[1] == 0) + (s[2] == 0);
    if (zeros == 1) {
      int r = s[0] == 0 ? 0 : (s[1] == 0 ? 1 : 2);
      const int a = v[r], b = v[(r + 1) % 3], c = v[(r + 2) % 3];
      const int x = edge_point(b, c);
      side[side_of(sign[b])].emplace_back(a, b, x);
      side[side_of(sign[c])].emplace_back(a, x, c);
    } else {
      // Exactly one vertex is alone on its side.
      int r = 0;
      for (int k = 0; k < 3; ++k) {
        if (s[k] != s[(k + 1) % 3] && s[k] != s[(k + 2) % 3]) r = k;
      }
      const int a = v[r], b = v[(r + 1) % 3], c = v[(r + 2) % 3];
      const int xab = edge_point(a, b);
      const int xca = edge_point(c, a);
      side[side_of(sign[a])].emplace_back(a, xab, xca);
      side[side_of(sign[b])].emplace_back(xab, b, c);
      side[side_of(sign[b])].emplace_back(xab, c, xca);
    }
  }

  cap_side(side[0], pts, on_plane, n);
  cap_side(side[1], pts, on_plane, -n);

  result.negative = compact(side[0], pts, mesh.id.empty() ? "" : mesh.id + "0");
  result.positive = compact(side[1], pts, mesh.id.empty() ? "" : mesh.id + "1");
  const double vn = mesh_volume(*result.negative);
  const double vp = mesh_volume(*result.positive);
  result.status = (vn < options.min_volume || vp < options.min_volume || vn <= 0.0 || vp <= 0.0)
                      ? SliceStatus::Degenerate
                      : SliceStatus::Split;
  return result;
}

std::vector<std::vector<Vec2>> horizontal_section(const TriangleMesh& mesh, double height) {
  const auto count = static_cast<std::size_t>(mesh.num_vertices());
  std::vector<char> above(count);
  for (std::size_t i = 0; i < count; ++i) above[i] = mesh.vertices(static_cast<Eigen::Index>(i), 2) >= height;

  std::unordered_map<std::uint64_t, Vec2> points;
  auto edge_point = [&](int a, int b) {
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    const std::uint64_t key = edge_key(lo, hi);
    if (!points.count(key)) {
      const Vec3 p = mesh.vertex(lo);
      const Vec3 q = mesh.vertex(hi);
      const double t = (height - p.z()) / (q.z() - p.z());
      const Vec3 x = p + t * (q - p);
      points.emplace(key, Vec2(x.x(), x.y()));
    }
    return key;
  };

  std::map<std::uint64_t, std::uint64_t> next;
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    std::array<int, 3> v{mesh.faces(f, 0), mesh.faces(f, 1), mesh.faces(f, 2)};
    const int ups = above[v[0]] + above[v[1]] + above[v[2]];
    if (ups == 0 || ups == 3) continue;
    int r = 0;
    for (int k = 0; k < 3; ++k) {
      if (above[v[k]] != above[v[(k + 1) % 3]] && above[v[k]] != above[v[(k + 2) % 3]]) r = k;
    }
    const int a = v[r], b = v[(r + 1) % 3], c = v[(r + 2) % 3];
    const std::uint64_t xab = edge_point(a, b);
    const std::uint64_t xca = edge_point(c, a);
    if (above[a]) {
      next[xab] = xca;
    } else {
      next[xca] = xab;
    }
  }

  std::vector<std::vector<Vec2>> loops;
  while (!next.empty()) {
    const std::uint64_t start = next.begin()->first;
    std::vector<Vec2> loop;
    std::uint64_t cur = start;
    while (true) {
      auto it = next.find(cur);
      if (it == next.end()) break;
      loop.push_back(points.at(cur));
      cur = it->second;
      next.erase(it);
      if (cur == start) break;
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace aerochunk
