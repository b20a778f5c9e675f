#pragma once

#include "aerochunk/mesh.hpp"

#include <optional>
#include <vector>

namespace aerochunk {

enum class SliceStatus {
  Split,       ///< Both parts non-empty and above the minimum volume.
  Miss,        ///< Plane does not cross the mesh; one side is the whole input.
  Degenerate,  ///< Plane crosses the mesh but one part is below the minimum volume.
};

struct SliceOptions {
  /// Parts with smaller volume make the cut degenerate (cubic meters).
  double min_volume = 0.0;
  double snap_tolerance = kPlaneSnapTolerance;
};

struct SliceResult {
  SliceStatus status = SliceStatus::Miss;
  /// Part on the side opposite to the plane normal. Unset when that side is empty.
  std::optional<TriangleMesh> negative;
  /// Part on the side the plane normal points into.
  std::optional<TriangleMesh> positive;
};

/// Split a watertight mesh by a plane; the cross-section is capped on both parts so each
/// result is watertight. Vertices within the snap tolerance of the plane are moved onto it.
/// Degenerate results still carry both parts for diagnostics.
SliceResult slice_mesh(const TriangleMesh& mesh, const CutPlane& plane, const SliceOptions& options = {});

/// Closed cross-section contours of a mesh with the plane z = height, oriented
/// counter-clockwise (seen from +z) around material and clockwise around holes.
/// Vertices exactly at the height count as above it.
std::vector<std::vector<Vec2>> horizontal_section(const TriangleMesh& mesh, double height);

}  // namespace aerochunk
