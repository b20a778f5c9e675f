#pragma once

#include "aerochunk/bsp.hpp"
#include "aerochunk/extruder.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aerochunk {

enum class FeasibilityMode {
  PerUav,         ///< each UAV prints at most one chunk
  CapacityReuse,  ///< a UAV prints several chunks while their total fits its material
};

/// UAV fleet. Capacities are material volumes in cubic meters, sorted non-increasing with
/// the ids kept parallel.
struct FleetConfig {
  std::vector<double> capacities;
  std::vector<std::string> uav_ids;
  ExtruderClearance clearance;
  ExtruderGeometry arm;
  FeasibilityMode mode = FeasibilityMode::CapacityReuse;

  /// Sorts capacities (stable, descending) and fills missing ids with "uav<k>".
  /// Throws ParseError for empty fleets or non-positive capacities.
  static FleetConfig make(std::vector<double> capacities, std::vector<std::string> ids = {});

  std::size_t size() const { return capacities.size(); }
  double total_capacity() const;
  double largest_capacity() const { return capacities.empty() ? 0.0 : capacities.front(); }
};

/// Total fleet material is enough for the whole mesh.
bool check_primal_feasibility(double total_volume, const FleetConfig& fleet);

/// Chunk-to-UAV index assignment under `mode`, or nothing when no assignment exists.
/// Capacity reuse tries best-fit-decreasing first and falls back to an exact search.
std::optional<std::vector<int>> pack_chunks(std::span<const double> chunk_volumes, std::span<const double> capacities,
                                            FeasibilityMode mode);

bool tree_feasible(std::span<const double> chunk_volumes, const FleetConfig& fleet, FeasibilityMode mode);
inline bool tree_feasible(std::span<const double> chunk_volumes, const FleetConfig& fleet) {
  return tree_feasible(chunk_volumes, fleet, fleet.mode);
}

struct ScheduleEntry {
  std::string chunk_id;
  std::string uav_id;
  double volume = 0.0;  ///< cubic meters
};

struct Schedule {
  std::vector<ScheduleEntry> entries;  ///< print order
  std::vector<std::pair<std::string, std::string>> dependencies;  ///< (before, after)
  std::vector<std::string> uav_ids;
  std::vector<double> capacities;
  std::vector<double> consumption;  ///< per UAV, parallel to uav_ids

  double capacity_of(const std::string& uav) const;
};

/// Assign every leaf to a UAV and emit entries in in-order priority. Chunks are first placed
/// best-fit in print order; if that strands a chunk the assignment falls back to pack_chunks.
/// Throws InfeasibleError naming the first chunk that cannot be placed.
Schedule assign_chunks(const BspTree& tree, const FleetConfig& fleet);

/// Capacity overruns, dependency order violations and unknown ids; empty when valid.
std::vector<std::string> schedule_violations(const Schedule& schedule);

}  // namespace aerochunk
