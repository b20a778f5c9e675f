#pragma once

#include "aerochunk/config.hpp"
#include "aerochunk/error.hpp"
#include "aerochunk/scheduler.hpp"
#include "aerochunk/search.hpp"
#include "aerochunk/sim.hpp"
#include "aerochunk/toolpath.hpp"

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace aerochunk {

struct Decomposition {
  SearchResult search;
  Schedule schedule;
};

/// Search and schedule. Throws InfeasibleError (with the primal or packing diagnosis).
Decomposition decompose(const TriangleMesh& mesh, const PipelineConfig& config);

/// Chunk STLs, bsp.json, schedule.json and search_trace.json under `dir`. Stale chunk files
/// from earlier runs are removed.
void write_decomposition(const Decomposition& d, double phi_max, const std::filesystem::path& dir);

struct ChunkPrint {
  std::string chunk_id;
  Toolpath toolpath;
  Trajectory end_effector;
  Trajectory body;
};

struct PrintRun {
  std::vector<ChunkPrint> chunks;  ///< schedule order
  SimTrace trace;
  TrackingReport tracking;
  std::vector<ChunkVolumeCheck> volumes;
};

/// Slice every scheduled chunk (in parallel), build trajectories and simulate.
PrintRun print_schedule(const BspTree& tree, const Schedule& schedule, const PipelineConfig& config);

/// Toolpaths, trajectories, sim trace and report.json under `dir`.
void write_print_run(const PrintRun& run, const PipelineConfig& config, const std::filesystem::path& dir);

struct VerifyReport {
  std::vector<std::string> passed;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-check the decomposition artifacts in `dir`: chunk meshes watertight with positive
/// volume, volumes summing to the root volume, cut angles within the recorded cap, schedule
/// order consistent with the tree and per-UAV material within capacity.
VerifyReport verify_artifacts(const std::filesystem::path& dir);

ExitCode cmd_decompose(const PipelineConfig& config, std::ostream& log);
ExitCode cmd_print(const PipelineConfig& config, std::ostream& log);
ExitCode cmd_verify(const std::filesystem::path& dir, std::ostream& log);

}  // namespace aerochunk
