#pragma once

#include "aerochunk/mesh_io.hpp"
#include "aerochunk/scheduler.hpp"
#include "aerochunk/search.hpp"
#include "aerochunk/sim.hpp"
#include "aerochunk/toolpath.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aerochunk {

struct ConfigValue {
  std::variant<double, bool, std::string, std::vector<ConfigValue>> value;
};

using ConfigSection = std::map<std::string, ConfigValue>;
/// Keys before the first [section] header land in section "".
using ConfigDocument = std::map<std::string, ConfigSection>;

/// Key/value document with [section] headers, # comments, numbers, quoted strings, booleans
/// and flat arrays. Throws ParseError with the line number on malformed input.
ConfigDocument parse_config_document(std::string_view text);

struct MeshSource {
  std::filesystem::path path;
  std::optional<MeshFormat> format;
  std::string generate;  ///< "dome" or "box" instead of a file
  double volume = 0.0;   ///< m^3, for generate = "dome"
  Vec3 size = Vec3::Ones();  ///< m, for generate = "box"
};

struct PipelineConfig {
  MeshSource mesh;
  FleetConfig fleet;
  SearchParams search;
  PrintParams print;
  SimParams sim;
  std::filesystem::path output_dir = "out";
  /// Explicit sampling cap; unset derives it from the connectivity and extruder limits.
  std::optional<double> phi_max_override;
  /// Sphere radius comes from the bead cross-section unless set explicitly.
  bool sphere_radius_from_bead = true;

  /// Recompute the sampling cap for `mode` (no effect on an explicit cap besides the mode).
  void set_angle_mode(AngleMode mode);
  void validate() const;
};

/// Paths in the document resolve against `base_dir`.
PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

TriangleMesh load_pipeline_mesh(const PipelineConfig& config);

AngleMode parse_angle_mode(std::string_view name);
FeasibilityMode parse_feasibility_mode(std::string_view name);
TrackerModel parse_tracker_model(std::string_view name);

}  // namespace aerochunk
