#include "support.hpp"

#include "aerochunk/error.hpp"

#include <doctest.h>

#include <numbers>

using namespace aerochunk;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SamplerParams params(int m, double phi_max) {
  SamplerParams p;
  p.normal_count = m;
  p.phi_max = phi_max;
  return p;
}

}  // namespace

TEST_CASE("extruder angle") {
  CHECK(extruder_phi_max(0.05, 0.05) == doctest::Approx(std::numbers::pi / 4));
  CHECK(extruder_phi_max(0.0, 0.05) == 0.0);
  CHECK(extruder_phi_max(std::sqrt(3.0) * 0.02, 0.02) == doctest::Approx(std::numbers::pi / 3).epsilon(1e-14));
  CHECK_THROWS_AS(extruder_phi_max(0.05, 0.0), ParseError);
  CHECK_THROWS_AS(extruder_phi_max(-0.01, 0.05), ParseError);
}

TEST_CASE("combining the angle limits") {
  CHECK(combine_phi_max(45 * kDeg, 45 * kDeg, AngleMode::PaperMax) == 45 * kDeg);
  CHECK(combine_phi_max(45 * kDeg, 45 * kDeg, AngleMode::SafeMin) == 45 * kDeg);
  CHECK(combine_phi_max(45 * kDeg, 60 * kDeg, AngleMode::PaperMax) == 60 * kDeg);
  CHECK(combine_phi_max(45 * kDeg, 60 * kDeg, AngleMode::SafeMin) == 45 * kDeg);

  const SamplerParams p = make_sampler_params(16, 4, ExtruderClearance{0.1, 0.1 / std::sqrt(3.0)});
  CHECK(p.phi_max == doctest::Approx(45 * kDeg));
  const SamplerParams q = make_sampler_params(16, 4, ExtruderClearance{0.1, 0.1 / std::sqrt(3.0)},
                                              45 * kDeg, AngleMode::PaperMax);
  CHECK(q.phi_max == doctest::Approx(60 * kDeg));
}

TEST_CASE("flat cap gives only +z") {
  for (int m : {1, 2, 9, 32}) {
    const auto ns = sample_normals(params(m, 0.0));
    REQUIRE(ns.size() == 1);
    CHECK(ns[0] == Vec3::UnitZ());
  }
  CHECK(sample_normals(params(1, 45 * kDeg)).size() == 1);
}

TEST_CASE("nine normals within the cap") {
  const auto ns = sample_normals(params(9, 45 * kDeg));
  CHECK(ns.size() == 9);
  CHECK(ns.front() == Vec3::UnitZ());
  for (const Vec3& n : ns) CHECK(angle_from_z(n) <= 45 * kDeg + 1e-9);
}

TEST_CASE("sampling properties over many parameter sets") {
  for (int m = 1; m <= 64; ++m) {
    for (double phi : {5.0, 30.0, 45.0, 60.0, 90.0}) {
      const auto ns = sample_normals(params(m, phi * kDeg));
      CAPTURE(m);
      CAPTURE(phi);
      CHECK(ns.size() <= static_cast<std::size_t>(m));
      CHECK(ns.size() >= 1);
      CHECK(ns.front() == Vec3::UnitZ());
      for (const Vec3& n : ns) {
        CHECK(std::abs(n.norm() - 1.0) <= 1e-9);
        CHECK(angle_from_z(n) <= phi * kDeg + 1e-9);
        CHECK(n.z() > 0.0);
      }
      CHECK(sample_normals(params(m, phi * kDeg)) == ns);
    }
  }
  CHECK(sample_normals(params(32, 45 * kDeg)).size() >= 25);
}

TEST_CASE("plane families") {
  const TriangleMesh cube = make_unit_cube();
  const auto one = plane_family(cube, Vec3::UnitZ(), 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].point.z() == 0.5);

  const auto three = plane_family(cube, Vec3::UnitZ(), 3);
  REQUIRE(three.size() == 3);
  CHECK(three[0].offset() == 0.25);
  CHECK(three[1].offset() == 0.5);
  CHECK(three[2].offset() == 0.75);

  TriangleMesh flat = make_box(Vec3::Zero(), Vec3(1, 1, 1e-8));
  CHECK(plane_family(flat, Vec3::UnitZ(), 3).empty());
}

TEST_CASE("family planes separate vertices on both sides") {
  for (const auto& mesh : testing::corpus_meshes()) {
    for (const Vec3& n : sample_normals(params(16, 45 * kDeg))) {
      for (const CutPlane& p : plane_family(mesh, n, 5)) {
        bool below = false;
        bool above = false;
        for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
          const double d = p.signed_distance(mesh.vertex(i));
          below = below || d < -kPlaneSnapTolerance;
          above = above || d > kPlaneSnapTolerance;
        }
        CHECK(below);
        CHECK(above);
      }
    }
  }
}

TEST_CASE("invalid sampler params") {
  CHECK_THROWS_AS(params(0, 0.5).validate(), ParseError);
  CHECK_THROWS_AS(params(4, 2.0).validate(), ParseError);
  SamplerParams p = params(4, 0.5);
  p.offsets_per_normal = 0;
  CHECK_THROWS_AS(p.validate(), ParseError);
}
