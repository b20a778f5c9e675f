#include "aerochunk/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace aerochunk {

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool point_in_ring(const std::vector<Vec2>& pts, const Ring& ring, const Vec2& q) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Vec2& a = pts[ring[i]];
    const Vec2& b = pts[ring[j]];
    if ((a.y() > q.y()) != (b.y() > q.y())) {
      const double x = a.x() + (q.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (q.x() < x) inside = !inside;
    }
  }
  return inside;
}

// Proper or touching intersection of segments pq and rs, ignoring shared endpoints by index.
bool segments_touch(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s, double eps) {
  const double d1 = orient(p, q, r);
  const double d2 = orient(p, q, s);
  const double d3 = orient(r, s, p);
  const double d4 = orient(r, s, q);
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))) {
    return true;
  }
  auto on_segment = [eps](const Vec2& a, const Vec2& b, const Vec2& c, double d) {
    if (std::abs(d) > eps) return false;
    return std::min(a.x(), b.x()) - 1e-15 <= c.x() && c.x() <= std::max(a.x(), b.x()) + 1e-15 &&
           std::min(a.y(), b.y()) - 1e-15 <= c.y() && c.y() <= std::max(a.y(), b.y()) + 1e-15;
  };
  return on_segment(p, q, r, d1) || on_segment(p, q, s, d2) || on_segment(r, s, p, d3) || on_segment(r, s, q, d4);
}

// A point just off the longest edge of a clockwise ring, on the material (left) side. Hole
// vertices may touch the enclosing ring, so vertices themselves are poor probes.
Vec2 material_probe(const std::vector<Vec2>& pts, const Ring& ring) {
  std::size_t best = 0;
  double best_len = -1.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const double len = (pts[ring[(i + 1) % ring.size()]] - pts[ring[i]]).squaredNorm();
    if (len > best_len) {
      best_len = len;
      best = i;
    }
  }
  const Vec2& a = pts[ring[best]];
  const Vec2& b = pts[ring[(best + 1) % ring.size()]];
  const Vec2 d = b - a;
  return 0.5 * (a + b) + 1e-4 * Vec2(-d.y(), d.x());
}

double ccw_angle(const Vec2& from, const Vec2& to) {
  double a = std::atan2(to.y(), to.x()) - std::atan2(from.y(), from.x());
  while (a < 0) a += 2 * std::numbers::pi;
  while (a >= 2 * std::numbers::pi) a -= 2 * std::numbers::pi;
  return a;
}

class EarClipper {
 public:
  EarClipper(const std::vector<Vec2>& pts, double eps) : pts_(pts), eps_(eps) {}

  // Splice `hole` (clockwise) into `outer` (counter-clockwise) through a visible bridge.
  void bridge(Ring& outer, const Ring& hole, const std::vector<Ring>& obstacles) const {
    std::size_t m_pos = 0;
    for (std::size_t i = 1; i < hole.size(); ++i) {
      const Vec2& p = pts_[hole[i]];
      const Vec2& best = pts_[hole[m_pos]];
      if (p.x() > best.x() || (p.x() == best.x() && p.y() < best.y())) m_pos = i;
    }
    const int m = hole[m_pos];
    const Vec2& mp = pts_[m];

    std::vector<std::size_t> order(outer.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return (pts_[outer[a]] - mp).squaredNorm() < (pts_[outer[b]] - mp).squaredNorm();
    });

    auto blocked = [&](const Ring& ring, int p_idx) {
      const Vec2& pp = pts_[p_idx];
      for (std::size_t i = 0; i < ring.size(); ++i) {
        const int a = ring[i];
        const int b = ring[(i + 1) % ring.size()];
        const bool incident = a == p_idx || b == p_idx || a == m || b == m ||
                              pts_[a] == pp || pts_[b] == pp || pts_[a] == mp || pts_[b] == mp;
        if (incident) continue;
        if (segments_touch(mp, pp, pts_[a], pts_[b], eps_)) return true;
      }
      return false;
    };

    std::size_t chosen = outer.size();
    for (std::size_t pos : order) {
      const int p = outer[pos];
      const Vec2& pp = pts_[p];
      const Vec2 to_next = pts_[outer[(pos + 1) % outer.size()]] - pp;
      const Vec2 to_prev = pts_[outer[(pos + outer.size() - 1) % outer.size()]] - pp;
      const Vec2 dir = mp - pp;
      if (dir.squaredNorm() == 0.0) {
        chosen = pos;
        break;
      }
      if (ccw_angle(to_next, dir) >= ccw_angle(to_next, to_prev)) continue;
      if (blocked(outer, p) || blocked(hole, p)) continue;
      bool hit = false;
      for (const Ring& other : obstacles) {
        if (blocked(other, p)) {
          hit = true;
          break;
        }
      }
      if (hit) continue;
      chosen = pos;
      break;
    }
    if (chosen == outer.size()) chosen = order.front();

    Ring spliced;
    spliced.reserve(outer.size() + hole.size() + 2);
    spliced.insert(spliced.end(), outer.begin(), outer.begin() + static_cast<long>(chosen) + 1);
    for (std::size_t k = 0; k <= hole.size(); ++k) spliced.push_back(hole[(m_pos + k) % hole.size()]);
    spliced.push_back(outer[chosen]);
    spliced.insert(spliced.end(), outer.begin() + static_cast<long>(chosen) + 1, outer.end());
    outer = std::move(spliced);
  }

  void clip(const Ring& ring, std::vector<std::array<int, 3>>& out) const {
    const std::size_t n = ring.size();
    if (n < 3) return;
    std::vector<std::size_t> prev(n), next(n);
    for (std::size_t i = 0; i < n; ++i) {
      prev[i] = (i + n - 1) % n;
      next[i] = (i + 1) % n;
    }
    std::size_t remaining = n;
    std::size_t cursor = 0;

    auto remove = [&](std::size_t i) {
      out.push_back({ring[prev[i]], ring[i], ring[next[i]]});
      next[prev[i]] = next[i];
      prev[next[i]] = prev[i];
      cursor = next[i];
      --remaining;
    };

    while (remaining > 3) {
      bool clipped = false;
      std::size_t i = cursor;
      for (std::size_t step = 0; step < remaining; ++step, i = next[i]) {
        if (is_ear(ring, prev, next, i, remaining)) {
          remove(i);
          clipped = true;
          break;
        }
      }
      if (clipped) continue;

      // No strict ear: drop a degenerate (collinear or spike) vertex, else the least reflex one.
      std::size_t best = cursor;
      double best_score = -std::numeric_limits<double>::infinity();
      i = cursor;
      for (std::size_t step = 0; step < remaining; ++step, i = next[i]) {
        const double o = orient(pts_[ring[prev[i]]], pts_[ring[i]], pts_[ring[next[i]]]);
        const double score = std::abs(o) <= eps_ ? std::numeric_limits<double>::max() : o;
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      remove(best);
    }
    const std::size_t a = cursor;
    out.push_back({ring[prev[a]], ring[a], ring[next[a]]});
  }

 private:
  bool is_ear(const Ring& ring, const std::vector<std::size_t>& prev, const std::vector<std::size_t>& next,
              std::size_t i, std::size_t remaining) const {
    const Vec2& a = pts_[ring[prev[i]]];
    const Vec2& b = pts_[ring[i]];
    const Vec2& c = pts_[ring[next[i]]];
    if (orient(a, b, c) <= eps_) return false;
    std::size_t j = next[next[i]];
    for (std::size_t step = 0; step + 3 < remaining; ++step, j = next[j]) {
      const Vec2& p = pts_[ring[j]];
      if (p == a || p == b || p == c) continue;
      if (orient(a, b, p) >= -eps_ && orient(b, c, p) >= -eps_ && orient(c, a, p) >= -eps_) return false;
    }
    return true;
  }

  const std::vector<Vec2>& pts_;
  double eps_;
};

}  // namespace

double ring_area(const std::vector<Vec2>& points, const Ring& ring) {
  double a = 0.0;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Vec2& p = points[ring[j]];
    const Vec2& q = points[ring[i]];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

std::vector<std::array<int, 3>> triangulate_rings(const std::vector<Vec2>& points, const std::vector<Ring>& rings) {
  std::vector<std::array<int, 3>> triangles;
  if (rings.empty()) return triangles;

  double extent = 0.0;
  for (const Ring& r : rings) {
    for (int idx : r) extent = std::max(extent, points[idx].cwiseAbs().maxCoeff());
  }
  // Orientation tolerance scales with the squared coordinate magnitude.
  const double eps = std::max(extent * extent, 1e-30) * 1e-14;
  EarClipper clipper(points, eps);

  std::vector<std::size_t> outers, holes;
  std::vector<double> areas(rings.size());
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (rings[i].size() < 3) continue;
    areas[i] = ring_area(points, rings[i]);
    (areas[i] < 0.0 ? holes : outers).push_back(i);
  }

  std::vector<std::vector<std::size_t>> holes_of(rings.size());
  std::vector<std::size_t> orphans;
  for (std::size_t h : holes) {
    std::size_t owner = rings.size();
    double owner_area = std::numeric_limits<double>::infinity();
    const Vec2 probe = material_probe(points, rings[h]);
    for (std::size_t o : outers) {
      if (areas[o] < owner_area && point_in_ring(points, rings[o], probe)) {
        owner = o;
        owner_area = areas[o];
      }
    }
    if (owner == rings.size()) {
      orphans.push_back(h);
    } else {
      holes_of[owner].push_back(h);
    }
  }

  for (std::size_t o : outers) {
    Ring merged = rings[o];
    auto& hs = holes_of[o];
    std::sort(hs.begin(), hs.end(), [&](std::size_t a, std::size_t b) {
      auto max_x = [&](std::size_t r) {
        double m = -std::numeric_limits<double>::infinity();
        for (int idx : rings[r]) m = std::max(m, points[idx].x());
        return m;
      };
      return max_x(a) > max_x(b);
    });
    for (std::size_t k = 0; k < hs.size(); ++k) {
      std::vector<Ring> pending;
      for (std::size_t q = k + 1; q < hs.size(); ++q) pending.push_back(rings[hs[q]]);
      clipper.bridge(merged, rings[hs[k]], pending);
    }
    clipper.clip(merged, triangles);
  }

  // Holes with no enclosing outer ring are capped on their own with reversed winding so
  // their boundary edges still close.
  for (std::size_t h : orphans) {
    Ring reversed(rings[h].rbegin(), rings[h].rend());
    std::vector<std::array<int, 3>> local;
    clipper.clip(reversed, local);
    for (auto t : local) triangles.push_back({t[0], t[2], t[1]});
  }
  return triangles;
}

}  // namespace aerochunk
