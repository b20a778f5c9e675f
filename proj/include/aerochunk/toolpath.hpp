#pragma once

#include "aerochunk/extruder.hpp"
#include "aerochunk/mesh.hpp"

#include <string>
#include <vector>

namespace aerochunk {

struct PrintParams {
  double layer_height = 0.01;  ///< nominal layer height (m)
  double line_width = 0.01;    ///< bead width (m)
  double infill_fraction = 1.0;
  double avg_speed = 0.1;  ///< m/s
  /// Extrusion rate while depositing (liters/s). Zero derives it from the bead cross-section
  /// times avg_speed.
  double deposition_rate = 0.0;

  void validate() const;
};

struct ToolpathSegment {
  Vec3 start;
  Vec3 end;
  bool extruding = false;
  double extrusion_rate = 0.0;  ///< liters/s

  double length() const { return (end - start).norm(); }
};

struct Toolpath {
  std::vector<ToolpathSegment> segments;
  double layer_height = 0.0;  ///< effective height; layers tile the chunk height exactly
  int layer_count = 0;

  double extruded_length() const;
  double total_length() const;
};

/// Layer-by-layer perimeter plus rectilinear infill.
///
/// The chunk height is split into round(height / layer_height) layers (at least one) and each
/// layer is sampled at its mid-height. Every cross-section contour gets a perimeter inset by
/// half a line width; the region inset by a full line width is filled with parallel lines
/// spaced line_width / infill_fraction apart, alternating between x and y each layer.
/// Throws MeshError for an empty mesh.
Toolpath slice_chunk(const TriangleMesh& chunk, const PrintParams& params);

enum class Frame { EndEffector, Body };

struct TrajectorySample {
  double time = 0.0;
  Vec3 position;
  double yaw = 0.0;
  bool extruding = false;  ///< material flows while moving from this sample to the next
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Frame frame = Frame::EndEffector;

  double duration() const { return samples.empty() ? 0.0 : samples.back().time - samples.front().time; }
  double path_length() const;
  /// Position and extrusion flag at time t by linear interpolation (clamped to the ends).
  TrajectorySample at(double t) const;
};

/// Waypoints at segment ends timed at avg_speed; zero-length segments are dropped and gaps
/// between segments become non-extruding moves.
Trajectory toolpath_to_trajectory(const Toolpath& path, const PrintParams& params);

/// Nozzle position relative to the body origin for a given yaw.
Vec3 nozzle_offset(const ExtruderGeometry& geom, double yaw = 0.0);

/// Body-origin references that place the nozzle on the end-effector trajectory.
Trajectory body_frame_transform(const Trajectory& end_effector, const ExtruderGeometry& geom);
/// Inverse of body_frame_transform.
Trajectory end_effector_transform(const Trajectory& body, const ExtruderGeometry& geom);

/// One segment per line: "x0 y0 z0 x1 y1 z1 extruding rate".
std::string toolpath_to_text(const Toolpath& path);
/// CSV with header time,x,y,z,yaw,extruding.
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& csv, Frame frame);

}  // namespace aerochunk
