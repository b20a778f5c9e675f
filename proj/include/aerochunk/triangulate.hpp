#pragma once

#include "aerochunk/geometry.hpp"

#include <array>
#include <vector>

namespace aerochunk {

using Ring = std::vector<int>;

/// Signed area of a closed ring of indices into `points` (positive when counter-clockwise).
double ring_area(const std::vector<Vec2>& points, const Ring& ring);

/// Triangulate a set of planar rings by ear clipping.
///
/// Counter-clockwise rings are outer boundaries, clockwise rings are holes. Each hole is
/// attached to the smallest outer ring containing it and bridged into it before clipping;
/// outer rings are triangulated independently. Output triangles are counter-clockwise and
/// reference the indices used in the rings, so shared vertices stay shared.
std::vector<std::array<int, 3>> triangulate_rings(const std::vector<Vec2>& points, const std::vector<Ring>& rings);

}  // namespace aerochunk
