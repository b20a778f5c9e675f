#pragma once

#include "aerochunk/extruder.hpp"
#include "aerochunk/mesh.hpp"

#include <numbers>
#include <vector>

namespace aerochunk {

/// How the connectivity and extruder angle limits combine into the sampling cap.
enum class AngleMode {
  PaperMax,  ///< Larger of the two limits.
  SafeMin,   ///< Smaller of the two limits; never admits a cut that violates either.
};

struct SamplerParams {
  int normal_count = 32;       ///< M: upper bound on sampled normals
  int offsets_per_normal = 8;  ///< planes tried per normal
  double phi_max = std::numbers::pi / 4;
  ExtruderClearance extruder;
  double phi_conn_max = std::numbers::pi / 4;
  AngleMode mode = AngleMode::SafeMin;

  /// Throws ParseError when counts are non-positive or phi_max is outside [0, pi/2].
  void validate() const;
};

/// Largest cut slope the extruder head clears: atan(h / l). Throws for l <= 0 or h < 0.
double extruder_phi_max(double nozzle_height, double head_length);

double combine_phi_max(double phi_conn, double phi_extr, AngleMode mode);

/// Params whose phi_max combines the connectivity limit with the extruder clearance.
SamplerParams make_sampler_params(int normal_count, int offsets_per_normal, const ExtruderClearance& extruder,
                                  double phi_conn_max = std::numbers::pi / 4, AngleMode mode = AngleMode::SafeMin);

/// Normals on the spherical cap of half-angle phi_max around +z. +z comes first, followed by
/// rings of constant polar angle (azimuth-major order). At most normal_count normals.
std::vector<Vec3> sample_normals(const SamplerParams& params);

/// `count` planes with the given normal, offsets evenly spaced strictly inside the mesh's
/// projection interval. Empty when the interval is too thin to separate vertices.
std::vector<CutPlane> plane_family(const TriangleMesh& mesh, const Vec3& normal, int count);

}  // namespace aerochunk
