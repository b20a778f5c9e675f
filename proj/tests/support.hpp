#pragma once

#include "aerochunk/bsp.hpp"
#include "aerochunk/mesh.hpp"
#include "aerochunk/primitives.hpp"
#include "aerochunk/sampler.hpp"

#include <fmt/format.h>

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing {

using namespace aerochunk;

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / fmt::format("aerochunk_{}_{}", name, ::getpid());
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string ascii_stl(const TriangleMesh& mesh) {
  std::string out = "solid test\n";
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    out += "facet normal 0 0 0\nouter loop\n";
    for (int k = 0; k < 3; ++k) {
      const Vec3 p = mesh.corner(f, k);
      out += fmt::format("vertex {} {} {}\n", p.x(), p.y(), p.z());
    }
    out += "endloop\nendfacet\n";
  }
  return out + "endsolid test\n";
}

inline std::string obj_text(const TriangleMesh& mesh, Eigen::Index skip_face = -1) {
  std::string out;
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
    out += fmt::format("v {} {} {}\n", mesh.vertices(i, 0), mesh.vertices(i, 1), mesh.vertices(i, 2));
  }
  for (Eigen::Index f = 0; f < mesh.num_faces(); ++f) {
    if (f == skip_face) continue;
    out += fmt::format("f {} {} {}\n", mesh.faces(f, 0) + 1, mesh.faces(f, 1) + 1, mesh.faces(f, 2) + 1);
  }
  return out;
}

/// Cube, hemisphere and torus used by the property tests.
inline std::vector<TriangleMesh> corpus_meshes() {
  TriangleMesh cube = make_unit_cube();
  cube.id = "cube";
  TriangleMesh hemi = make_hemisphere(0.5, 32, 10);
  hemi.id = "hemisphere";
  TriangleMesh torus = make_torus(0.4, 0.15, 32, 16, Vec3(0.0, 0.0, 0.2));
  torus.id = "torus";
  return {cube, hemi, torus};
}

/// Random unit normal within `phi_max` of +z.
inline Vec3 random_normal(std::mt19937_64& rng, double phi_max) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double phi = phi_max * u(rng);
  const double theta = 2.0 * std::numbers::pi * u(rng);
  return Vec3(std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta), std::cos(phi));
}

/// A random plane through a random interior offset of the leaf's projection interval.
inline CutPlane random_plane(std::mt19937_64& rng, const TriangleMesh& leaf, double phi_max) {
  const Vec3 n = random_normal(rng, phi_max);
  const ProjectionInterval iv = project_interval(leaf, n);
  std::uniform_real_distribution<double> u(0.15, 0.85);
  return CutPlane{n, (iv.min + u(rng) * iv.length()) * n};
}

inline double total_leaf_volume(const BspTree& tree) {
  double sum = 0.0;
  for (double v : leaf_volumes(tree)) sum += v;
  return sum;
}

}  // namespace testing
