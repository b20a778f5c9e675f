#pragma once

#include "aerochunk/bsp.hpp"
#include "aerochunk/extruder.hpp"
#include "aerochunk/scheduler.hpp"
#include "aerochunk/toolpath.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace aerochunk {

enum class TrackerModel {
  FirstOrder,   ///< x += (dt / tau) (x_des - x)
  SecondOrder,  ///< x'' = w^2 (x_des - x) - 2 zeta w x', with w = 2 zeta / tau
};

struct SimParams {
  double dt = 0.01;
  /// Ramp-following lag (s): both tracker models trail a constant-speed reference by v * tau.
  double tracking_time_constant = 0.3;
  TrackerModel tracker = TrackerModel::SecondOrder;
  double damping_ratio = 0.7;
  double deposition_sphere_radius = 0.005;  ///< m
  std::uint64_t rng_seed = 1;
  double disturbance_std = 0.0;  ///< m, per-step position noise
  ExtruderGeometry extruder;

  void validate() const;
};

/// Sphere radius whose volume per diameter of travel equals the bead cross-section
/// line_width * layer_height.
double bead_sphere_radius(double line_width, double layer_height);

struct SimSample {
  double time = 0.0;
  int chunk = 0;  ///< index into SimTrace::chunks
  Vec3 desired;   ///< body frame reference
  Vec3 actual;
  double yaw = 0.0;
  bool extruding = false;
};

struct DepositionEvent {
  double time = 0.0;
  int chunk = 0;
  Vec3 position;  ///< actual nozzle position
  double volume = 0.0;  ///< m^3
};

struct ChunkRun {
  std::string chunk_id;
  std::string uav_id;
  double start_time = 0.0;
  double completion_time = 0.0;
  double deposited = 0.0;  ///< m^3
};

struct SimTrace {
  std::vector<ChunkRun> chunks;  ///< execution order
  std::vector<SimSample> samples;
  std::vector<DepositionEvent> events;
  std::map<std::string, double> consumption;  ///< per UAV, m^3
  std::map<std::string, double> capacity;
  Vec3 nozzle_offset = Vec3::Zero();  ///< body to nozzle at zero yaw
};

/// Print every scheduled chunk in order, one UAV active at a time.
///
/// Each trajectory is a body-frame reference; the tracker follows it from rest at its first
/// sample. One deposition sphere is emitted for every sphere diameter of reference travel while
/// extruding, at the actual nozzle position. Throws SimulationError on a missing trajectory,
/// a dependency printed out of order, or a UAV running out of material.
SimTrace simulate(const Schedule& schedule, const std::map<std::string, Trajectory>& trajectories,
                  const SimParams& params);

struct OverlayPoint {
  std::string chunk_id;
  double layer_z = 0.0;  ///< reference nozzle height
  Vec2 desired;
  Vec2 actual;
};

struct TrackingReport {
  double max_error = 0.0;
  double mean_error = 0.0;
  double rms_error = 0.0;
  std::size_t sample_count = 0;
  std::vector<OverlayPoint> overlay;  ///< extruding samples, ordered by chunk then time
};

TrackingReport tracking_error_report(const SimTrace& trace);

struct ChunkVolumeCheck {
  std::string chunk_id;
  double deposited_liters = 0.0;
  double chunk_liters = 0.0;
  double relative_gap = 0.0;  ///< |deposited - chunk| / chunk
};

/// One row per simulated chunk, in execution order.
std::vector<ChunkVolumeCheck> deposition_volume_check(const SimTrace& trace, const BspTree& tree);

/// Chunk start, deposition and completion events, one JSON object per line.
std::string trace_to_jsonl(const SimTrace& trace);
std::string chunk_summary_csv(const SimTrace& trace);
std::string overlay_csv(const TrackingReport& report);

}  // namespace aerochunk
