#pragma once

#include "aerochunk/mesh.hpp"

namespace aerochunk {

TriangleMesh make_box(const Vec3& lo, const Vec3& hi);
inline TriangleMesh make_unit_cube() { return make_box(Vec3::Zero(), Vec3::Ones()); }

/// Tetrahedron with corners at the origin and the three unit axis points.
TriangleMesh make_unit_tetrahedron();

/// Subdivided icosahedron; 20 * 4^subdivisions faces.
TriangleMesh make_icosphere(double radius, int subdivisions);

/// Solid hemisphere resting on z = 0 with a flat base disk.
TriangleMesh make_hemisphere(double radius, int segments, int rings);

/// Torus around the z axis centred at `center`.
TriangleMesh make_torus(double major_radius, double minor_radius, int major_segments, int minor_segments,
                        const Vec3& center = Vec3::Zero());

/// Solid hemispherical dome rescaled so its polyhedral volume equals `volume` (cubic meters).
TriangleMesh make_dome(double volume, int segments = 48, int rings = 16);

}  // namespace aerochunk
