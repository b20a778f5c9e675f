#include "support.hpp"

#include "aerochunk/config.hpp"
#include "aerochunk/error.hpp"

#include <doctest.h>

#include <fstream>
#include <numbers>

using namespace aerochunk;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const char* kMinimal = R"(
[mesh]
generate = "dome"
volume_l = 25.24

[fleet]
count = 8
capacity_l = 4
)";

PipelineConfig parse(const std::string& text) { return parse_pipeline_config(text, "/base"); }

}  // namespace

TEST_CASE("document syntax") {
  const ConfigDocument doc = parse_config_document(R"(top = 1
# comment
[a]
s = "x # not a comment" # trailing
b = true
arr = [1, 2.5, -3e-2]
names = ["p", "q"]
empty = []
)");
  CHECK(std::get<double>(doc.at("").at("top").value) == 1.0);
  CHECK(std::get<std::string>(doc.at("a").at("s").value) == "x # not a comment");
  CHECK(std::get<bool>(doc.at("a").at("b").value));
  const auto& arr = std::get<std::vector<ConfigValue>>(doc.at("a").at("arr").value);
  REQUIRE(arr.size() == 3);
  CHECK(std::get<double>(arr[2].value) == -0.03);
  CHECK(std::get<std::vector<ConfigValue>>(doc.at("a").at("empty").value).empty());

  CHECK_THROWS_AS(parse_config_document("[a\n"), ParseError);
  CHECK_THROWS_AS(parse_config_document("[a]\n[a]\n"), ParseError);
  CHECK_THROWS_AS(parse_config_document("k = 1\nk = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config_document("k 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config_document("k = \"open\n"), ParseError);
  CHECK_THROWS_AS(parse_config_document("k = [1, 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config_document("k = 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config_document("k = nope\n"), ParseError);
}

TEST_CASE("errors carry the line number") {
  try {
    parse_config_document("a = 1\n\nb = \n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("minimal pipeline config with defaults") {
  const PipelineConfig cfg = parse(kMinimal);
  CHECK(cfg.mesh.generate == "dome");
  CHECK(cfg.mesh.volume == doctest::Approx(0.02524));
  CHECK(cfg.fleet.size() == 8);
  CHECK(cfg.fleet.capacities.front() == doctest::Approx(0.004));
  CHECK(cfg.fleet.uav_ids.front() == "uav0");
  CHECK(cfg.fleet.mode == FeasibilityMode::CapacityReuse);
  CHECK(cfg.search.sampler.phi_max == doctest::Approx(45 * kDeg));
  CHECK(cfg.search.sampler.mode == AngleMode::SafeMin);
  CHECK(cfg.sim.tracker == TrackerModel::SecondOrder);
  CHECK(cfg.sphere_radius_from_bead);
  CHECK(cfg.sim.deposition_sphere_radius == doctest::Approx(bead_sphere_radius(0.01, 0.01)));
  CHECK(cfg.output_dir == std::filesystem::path("/base/out"));

  const TriangleMesh dome = load_pipeline_mesh(cfg);
  CHECK(mesh_volume(dome) == doctest::Approx(0.02524).epsilon(1e-6));
}

TEST_CASE("every section") {
  const PipelineConfig cfg = parse(R"(
[mesh]
generate = "box"
size = [0.2, 0.3, 0.1]

[fleet]
capacities_l = [1.5, 3]
ids = ["small", "big"]
feasibility = "per-uav"

[extruder]
nozzle_height = 0.1
head_length = 0.05
arm_length = 0.3
nozzle_length = 0.2
joint_angle_deg = 30

[sampler]
normal_count = 9
offsets_per_normal = 5
phi_conn_max_deg = 45
mode = "paper-max"

[search]
w_inner = 2
w_outer = 5
max_iterations = 12
threads = 1

[print]
layer_height = 0.02
line_width = 0.015
infill_fraction = 0.5
avg_speed = 0.25
deposition_rate = 0.01

[sim]
dt = 0.02
tracking_time_constant = 0.1
tracker = "first-order"
damping_ratio = 0.9
deposition_sphere_radius = 0.004
rng_seed = 7
disturbance_std = 0.001

[output]
dir = "results"
)");
  CHECK(cfg.fleet.capacities == std::vector<double>{0.003, 0.0015});
  CHECK(cfg.fleet.uav_ids == std::vector<std::string>{"big", "small"});
  CHECK(cfg.fleet.mode == FeasibilityMode::PerUav);
  CHECK(cfg.fleet.arm.joint_angle == doctest::Approx(30 * kDeg));
  CHECK(cfg.sim.extruder.arm_length == 0.3);
  CHECK(cfg.search.sampler.phi_max == doctest::Approx(std::atan(2.0)));
  CHECK(cfg.search.sampler.normal_count == 9);
  CHECK(cfg.search.w_outer == 5);
  CHECK(cfg.print.infill_fraction == 0.5);
  CHECK(cfg.sim.tracker == TrackerModel::FirstOrder);
  CHECK(cfg.sim.rng_seed == 7);
  CHECK_FALSE(cfg.sphere_radius_from_bead);
  CHECK(cfg.sim.deposition_sphere_radius == 0.004);
  CHECK(cfg.output_dir == std::filesystem::path("/base/results"));
  CHECK((load_pipeline_mesh(cfg).vertices.colwise().maxCoeff() - Eigen::RowVector3d(0.2, 0.3, 0.1)).norm() < 1e-15);
}

TEST_CASE("angle mode override") {
  std::string text = kMinimal;
  text += "[extruder]\nnozzle_height = 0.1\nhead_length = 0.05\n";
  PipelineConfig cfg = parse(text);
  CHECK(cfg.search.sampler.phi_max == doctest::Approx(45 * kDeg));
  cfg.set_angle_mode(AngleMode::PaperMax);
  CHECK(cfg.search.sampler.phi_max == doctest::Approx(std::atan(2.0)));

  PipelineConfig fixed = parse(text + "[sampler]\nphi_max_deg = 30\n");
  fixed.set_angle_mode(AngleMode::PaperMax);
  CHECK(fixed.search.sampler.phi_max == doctest::Approx(30 * kDeg));
}

TEST_CASE("invalid configs") {
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[bogus]\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[print]\nlayer_hieght = 0.01\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[print]\nlayer_height = \"thin\"\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[print]\nlayer_height = 0\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[search]\nw_inner = 1.5\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[sim]\ntracker = \"pid\"\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[sampler]\nmode = \"widest\"\n"), ParseError);
  CHECK_THROWS_AS(parse(std::string(kMinimal) + "[sim]\nrng_seed = -1\n"), ParseError);
  CHECK_THROWS_AS(parse("[fleet]\ncount = 2\ncapacity_l = 1\n"), ParseError);
  CHECK_THROWS_AS(parse("[mesh]\ngenerate = \"dome\"\n[fleet]\ncount = 2\ncapacity_l = 1\n"), ParseError);
  CHECK_THROWS_AS(parse("[mesh]\ngenerate = \"cone\"\n[fleet]\ncount = 2\ncapacity_l = 1\n"), ParseError);
  CHECK_THROWS_AS(parse("[mesh]\ngenerate = \"box\"\n[fleet]\ncount = 0\n"), ParseError);
  CHECK_THROWS_AS(parse("[mesh]\ngenerate = \"box\"\n[fleet]\ncapacities_l = [1]\ncount = 1\n"), ParseError);
  CHECK_THROWS_AS(parse("[mesh]\ngenerate = \"box\"\npath = \"a.stl\"\n[fleet]\ncount = 1\ncapacity_l = 1\n"),
                  ParseError);
  CHECK_THROWS_AS(load_pipeline_config("/nonexistent/config.toml"), ParseError);
}

TEST_CASE("mesh paths resolve against the config directory") {
  const auto dir = testing::scratch_dir("config");
  std::ofstream(dir / "cube.stl") << testing::ascii_stl(make_unit_cube());
  std::ofstream(dir / "run.toml") << "[mesh]\npath = \"cube.stl\"\n[fleet]\ncount = 1\ncapacity_l = 2000\n";
  const PipelineConfig cfg = load_pipeline_config(dir / "run.toml");
  CHECK(cfg.mesh.path == dir / "cube.stl");
  CHECK(mesh_volume(load_pipeline_mesh(cfg)) == doctest::Approx(1.0));
  std::filesystem::remove_all(dir);
}

TEST_CASE("mode names") {
  CHECK(parse_angle_mode("paper-max") == AngleMode::PaperMax);
  CHECK(parse_feasibility_mode("per-uav") == FeasibilityMode::PerUav);
  CHECK(parse_tracker_model("first-order") == TrackerModel::FirstOrder);
  CHECK_THROWS_AS(parse_feasibility_mode("both"), ParseError);
}
