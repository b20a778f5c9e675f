#include "aerochunk/toolpath.hpp"

#include "aerochunk/error.hpp"
#include "aerochunk/slice.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace aerochunk {

namespace {

using Loop = std::vector<Vec2>;

double loop_area(const Loop& loop) {
  double a = 0.0;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    a += loop[j].x() * loop[i].y() - loop[i].x() * loop[j].y();
  }
  return 0.5 * a;
}

// Drop vertices closer than `min_edge` to their predecessor.
Loop simplify(const Loop& loop, double min_edge) {
  Loop out;
  for (const Vec2& p : loop) {
    if (out.empty() || (p - out.back()).norm() >= min_edge) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() < min_edge) out.pop_back();
  return out;
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct OffsetLine {
  Vec2 point;
  Vec2 dir;
};

// Offset every edge `distance` to its left (into the material for both outer contours and
// holes). Corners are mitered at the intersection of neighbouring offset edges; edges that
// collapse or reverse are removed until the loop is consistent. Empty when the loop vanishes.
std::optional<Loop> inset(const Loop& raw, double distance) {
  const Loop loop = simplify(raw, 1e-9);
  const std::size_t n = loop.size();
  if (n < 3) return std::nullopt;

  std::vector<OffsetLine> lines;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = (loop[(i + 1) % n] - loop[i]).normalized();
    const OffsetLine line{loop[i] + distance * Vec2(-d.y(), d.x()), d};
    if (!lines.empty() && std::abs(cross(lines.back().dir, d)) < 1e-9 && lines.back().dir.dot(d) > 0.0) continue;
    lines.push_back(line);
  }
  if (lines.size() > 1 && std::abs(cross(lines.back().dir, lines.front().dir)) < 1e-9 &&
      lines.back().dir.dot(lines.front().dir) > 0.0) {
    lines.pop_back();
  }

  Loop out;
  for (;;) {
    const std::size_t m = lines.size();
    if (m < 3) return std::nullopt;
    out.assign(m, Vec2::Zero());
    std::optional<std::size_t> drop;
    for (std::size_t i = 0; i < m && !drop; ++i) {
      const OffsetLine& a = lines[(i + m - 1) % m];
      const OffsetLine& b = lines[i];
      const double det = cross(a.dir, b.dir);
      if (std::abs(det) < 1e-12) {
        drop = i;
        break;
      }
      out[i] = b.point + b.dir * (cross(a.dir, a.point - b.point) / det);
    }
    for (std::size_t i = 0; i < m && !drop; ++i) {
      if ((out[(i + 1) % m] - out[i]).dot(lines[i].dir) <= 0.0) drop = i;
    }
    if (!drop) break;
    lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(*drop));
  }

  const double a0 = loop_area(loop);
  const double a1 = loop_area(out);
  // Outer contours shrink and holes grow, so the signed area always drops.
  if (a0 * a1 <= 0.0 || a1 >= a0) return std::nullopt;
  return out;
}

class PathBuilder {
 public:
  explicit PathBuilder(double rate) : rate_(rate) {}

  void travel_to(const Vec3& p) {
    if (!started_) {
      cursor_ = p;
      started_ = true;
      return;
    }
    if ((p - cursor_).norm() > 1e-12) segments_.push_back({cursor_, p, false, 0.0});
    cursor_ = p;
  }

  void extrude_to(const Vec3& p) {
    if ((p - cursor_).norm() > 1e-12) segments_.push_back({cursor_, p, true, rate_});
    cursor_ = p;
  }

  std::vector<ToolpathSegment> take() { return std::move(segments_); }

 private:
  double rate_;
  bool started_ = false;
  Vec3 cursor_ = Vec3::Zero();
  std::vector<ToolpathSegment> segments_;
};

// Intervals of the line {axis coordinate = c} inside the even-odd region of `loops`, where
// `axis` 1 scans along x (lines of constant y) and 0 scans along y.
std::vector<std::pair<double, double>> scan(const std::vector<Loop>& loops, int axis, double c) {
  const int along = 1 - axis;
  std::vector<double> hits;
  for (const Loop& loop : loops) {
    for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
      const Vec2& a = loop[j];
      const Vec2& b = loop[i];
      if ((a[axis] > c) != (b[axis] > c)) {
        hits.push_back(a[along] + (c - a[axis]) * (b[along] - a[along]) / (b[axis] - a[axis]));
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k + 1 < hits.size(); k += 2) {
    if (hits[k + 1] - hits[k] > 1e-9) out.emplace_back(hits[k], hits[k + 1]);
  }
  return out;
}

}  // namespace

void PrintParams::validate() const {
  if (!(layer_height > 0.0)) throw ParseError(fmt::format("layer_height must be > 0, got {}", layer_height));
  if (!(line_width > 0.0)) throw ParseError(fmt::format("line_width must be > 0, got {}", line_width));
  if (!(avg_speed > 0.0)) throw ParseError(fmt::format("avg_speed must be > 0, got {}", avg_speed));
  if (!(infill_fraction >= 0.0 && infill_fraction <= 1.0)) {
    throw ParseError(fmt::format("infill_fraction must lie in [0, 1], got {}", infill_fraction));
  }
  if (deposition_rate < 0.0) throw ParseError(fmt::format("deposition_rate must be >= 0, got {}", deposition_rate));
}

double Toolpath::extruded_length() const {
  double sum = 0.0;
  for (const auto& s : segments) {
    if (s.extruding) sum += s.length();
  }
  return sum;
}

double Toolpath::total_length() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.length();
  return sum;
}

Toolpath slice_chunk(const TriangleMesh& chunk, const PrintParams& params) {
  params.validate();
  if (chunk.empty()) throw MeshError(fmt::format("cannot slice empty chunk '{}'", chunk.id));

  const Eigen::AlignedBox3d box = bounding_box(chunk);
  const double height = box.sizes().z();
  const int layers = std::max(1, static_cast<int>(std::lround(height / params.layer_height)));
  const double h = height / layers > 0.0 ? height / layers : params.layer_height;
  const double w = params.line_width;
  const double rate = params.deposition_rate > 0.0 ? params.deposition_rate : w * h * params.avg_speed * 1000.0;

  Toolpath path;
  path.layer_height = h;
  PathBuilder builder(rate);
  for (int k = 0; k < layers; ++k) {
    const double z = box.min().z() + (k + 0.5) * (height / layers);
    const auto contours = horizontal_section(chunk, z);
    if (contours.empty()) continue;
    ++path.layer_count;
    auto lift = [z](const Vec2& p) { return Vec3(p.x(), p.y(), z); };

    for (const Loop& contour : contours) {
      const auto perimeter = inset(contour, 0.5 * w);
      if (!perimeter) continue;
      builder.travel_to(lift(perimeter->front()));
      for (std::size_t i = 1; i <= perimeter->size(); ++i) builder.extrude_to(lift((*perimeter)[i % perimeter->size()]));
    }

    if (params.infill_fraction <= 0.0) continue;
    std::vector<Loop> region;
    for (const Loop& contour : contours) {
      if (auto r = inset(contour, w)) region.push_back(std::move(*r));
    }
    if (region.empty()) continue;

    // Even layers: lines along x; odd layers: lines along y.
    const int axis = k % 2 == 0 ? 1 : 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Loop& r : region) {
      for (const Vec2& p : r) {
        lo = std::min(lo, p[axis]);
        hi = std::max(hi, p[axis]);
      }
    }
    const double spacing = w / params.infill_fraction;
    bool forward = true;
    for (double c = lo + 0.5 * spacing; c < hi; c += spacing) {
      auto intervals = scan(region, axis, c);
      if (!forward) std::reverse(intervals.begin(), intervals.end());
      for (auto [a, b] : intervals) {
        if (!forward) std::swap(a, b);
        Vec2 p0, p1;
        p0[axis] = c;
        p1[axis] = c;
        p0[1 - axis] = a;
        p1[1 - axis] = b;
        builder.travel_to(lift(p0));
        builder.extrude_to(lift(p1));
      }
      forward = !forward;
    }
  }
  path.segments = builder.take();
  return path;
}

std::string toolpath_to_text(const Toolpath& path) {
  std::string out;
  for (const auto& s : path.segments) {
    out += fmt::format("{} {} {} {} {} {} {} {}\n", s.start.x(), s.start.y(), s.start.z(), s.end.x(), s.end.y(),
                       s.end.z(), s.extruding ? 1 : 0, s.extrusion_rate);
  }
  return out;
}

}  // namespace aerochunk
