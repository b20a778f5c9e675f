#pragma once

#include "aerochunk/geometry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace aerochunk {

/// Closed, outward-oriented triangle mesh. Geometry in meters.
struct TriangleMesh {
  VertexMatrix vertices;
  FaceMatrix faces;
  std::string id;

  Eigen::Index num_vertices() const { return vertices.rows(); }
  Eigen::Index num_faces() const { return faces.rows(); }
  bool empty() const { return faces.rows() == 0; }

  Vec3 vertex(Eigen::Index i) const { return vertices.row(i).transpose(); }
  Vec3 corner(Eigen::Index f, int k) const { return vertices.row(faces(f, k)).transpose(); }
};

struct ProjectionInterval {
  double min = 0.0;
  double max = 0.0;

  double length() const { return max - min; }
  /// True when every vertex projects to the same value within the snap tolerance.
  bool degenerate() const { return length() <= kPlaneSnapTolerance; }
};

/// Merge vertices closer than `tolerance`, drop faces that collapse and unused vertices.
TriangleMesh weld_vertices(const std::vector<Vec3>& points, const std::vector<Eigen::Vector3i>& triangles,
                           double tolerance = kPlaneSnapTolerance);

/// Directed edges without exactly one opposite partner; empty for a watertight mesh.
std::vector<std::pair<int, int>> boundary_edges(const TriangleMesh& mesh);

/// Throws NonWatertightError / MeshError unless the mesh is closed, consistently oriented,
/// index-valid and encloses positive volume.
void validate_mesh(const TriangleMesh& mesh);

double mesh_volume(const TriangleMesh& mesh);
double surface_area(const TriangleMesh& mesh);
Vec3 face_normal(const TriangleMesh& mesh, Eigen::Index f);
Eigen::AlignedBox3d bounding_box(const TriangleMesh& mesh);

ProjectionInterval project_interval(const TriangleMesh& mesh, const Vec3& normal);

/// Copy with vertices scaled about the origin.
TriangleMesh scaled(const TriangleMesh& mesh, double factor);

}  // namespace aerochunk
