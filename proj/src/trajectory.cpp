#include "aerochunk/error.hpp"
#include "aerochunk/toolpath.hpp"

#include <fmt/format.h>

#include <Eigen/Geometry>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace aerochunk {

namespace {

constexpr double kGapTolerance = 1e-9;

Eigen::Isometry3d body_to_nozzle(const ExtruderGeometry& geom) {
  // Positive joint angle swings the nozzle toward +x of the body.
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translate(Vec3(0.0, 0.0, -geom.arm_length));
  t.rotate(Eigen::AngleAxisd(-geom.joint_angle, Vec3::UnitY()));
  t.translate(Vec3(0.0, 0.0, -geom.nozzle_length));
  return t;
}

// Rotation about +z applied in the plane so the vertical component passes through untouched.
Vec3 yaw_rotate(const Vec3& v, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return Vec3(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z());
}

Trajectory shift(const Trajectory& in, const ExtruderGeometry& geom, double sign, Frame frame) {
  Trajectory out;
  out.frame = frame;
  out.samples.reserve(in.samples.size());
  const Vec3 local = body_to_nozzle(geom).translation();
  for (const auto& s : in.samples) {
    TrajectorySample t = s;
    t.position = s.position + sign * yaw_rotate(local, s.yaw);
    out.samples.push_back(t);
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(fmt::format("trajectory CSV line {}: bad number '{}'", line, field));
  }
  return value;
}

}  // namespace

double Trajectory::path_length() const {
  double sum = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) sum += (samples[i].position - samples[i - 1].position).norm();
  return sum;
}

TrajectorySample Trajectory::at(double t) const {
  if (samples.empty()) return {};
  if (t <= samples.front().time) return samples.front();
  if (t >= samples.back().time) return samples.back();
  const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                   [](double v, const TrajectorySample& s) { return v < s.time; });
  const TrajectorySample& b = *it;
  const TrajectorySample& a = *(it - 1);
  const double u = (t - a.time) / (b.time - a.time);
  TrajectorySample out = a;
  out.time = t;
  out.position = a.position + u * (b.position - a.position);
  out.yaw = a.yaw + u * (b.yaw - a.yaw);
  return out;
}

Trajectory toolpath_to_trajectory(const Toolpath& path, const PrintParams& params) {
  params.validate();
  Trajectory traj;
  traj.frame = Frame::EndEffector;
  auto advance = [&](const Vec3& to, bool extruding) {
    TrajectorySample& last = traj.samples.back();
    const double length = (to - last.position).norm();
    if (length <= kGapTolerance) return;
    last.extruding = extruding;
    traj.samples.push_back({last.time + length / params.avg_speed, to, 0.0, false});
  };
  for (const auto& seg : path.segments) {
    if (seg.length() <= kGapTolerance) continue;
    if (traj.samples.empty()) {
      traj.samples.push_back({0.0, seg.start, 0.0, false});
    } else {
      advance(seg.start, false);
    }
    advance(seg.end, seg.extruding);
  }
  return traj;
}

Vec3 nozzle_offset(const ExtruderGeometry& geom, double yaw) {
  return yaw_rotate(body_to_nozzle(geom).translation(), yaw);
}

Trajectory body_frame_transform(const Trajectory& end_effector, const ExtruderGeometry& geom) {
  if (end_effector.frame != Frame::EndEffector) throw Error("body_frame_transform expects an end-effector trajectory");
  return shift(end_effector, geom, -1.0, Frame::Body);
}

Trajectory end_effector_transform(const Trajectory& body, const ExtruderGeometry& geom) {
  if (body.frame != Frame::Body) throw Error("end_effector_transform expects a body-frame trajectory");
  return shift(body, geom, 1.0, Frame::EndEffector);
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::string out = "time,x,y,z,yaw,extruding\n";
  for (const auto& s : traj.samples) {
    out += fmt::format("{},{},{},{},{},{}\n", s.time, s.position.x(), s.position.y(), s.position.z(), s.yaw,
                       s.extruding ? 1 : 0);
  }
  return out;
}

Trajectory trajectory_from_csv(const std::string& csv, Frame frame) {
  Trajectory traj;
  traj.frame = frame;
  std::istringstream in(csv);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1) {
      if (line != "time,x,y,z,yaw,extruding") throw ParseError("trajectory CSV: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      fields.push_back(rest.substr(0, pos));
    }
    fields.push_back(rest);
    if (fields.size() != 6) throw ParseError(fmt::format("trajectory CSV line {}: expected 6 fields", number));
    TrajectorySample s;
    s.time = parse_double(fields[0], number);
    s.position = Vec3(parse_double(fields[1], number), parse_double(fields[2], number), parse_double(fields[3], number));
    s.yaw = parse_double(fields[4], number);
    s.extruding = fields[5] == "1";
    if (!traj.samples.empty() && !(s.time > traj.samples.back().time)) {
      throw ParseError(fmt::format("trajectory CSV line {}: time not increasing", number));
    }
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace aerochunk
