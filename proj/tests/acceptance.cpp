#include "support.hpp"

#include "aerochunk/config.hpp"
#include "aerochunk/heuristic.hpp"
#include "aerochunk/pipeline.hpp"
#include "aerochunk/search.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace aerochunk;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("criterion {:>2}: {} {} ({})\n", id, ok ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
}

PipelineConfig dome_config() { return load_pipeline_config(fs::path(AEROCHUNK_SOURCE_DIR) / "configs" / "dome.toml"); }

// Brute-force feasibility: try every chunk-to-UAV assignment.
bool oracle_feasible(const std::vector<double>& chunks, const std::vector<double>& caps) {
  std::vector<double> load(caps.size(), 0.0);
  std::function<bool(std::size_t)> place = [&](std::size_t i) {
    if (i == chunks.size()) return true;
    for (std::size_t u = 0; u < caps.size(); ++u) {
      if (load[u] + chunks[i] > caps[u]) continue;
      load[u] += chunks[i];
      const bool ok = place(i + 1);
      load[u] -= chunks[i];
      if (ok) return true;
    }
    return false;
  };
  return place(0);
}

double oracle_cv(const std::vector<double>& v) {
  long double mean = 0.0L;
  for (double x : v) mean += x;
  mean /= static_cast<long double>(v.size());
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size())) / mean);
}

// Area of the overlap of two coplanar triangles given in 2D (Sutherland-Hodgman).
double overlap_area(std::vector<Vec2> poly, std::array<Vec2, 3> clip) {
  auto cross = [](const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); };
  if (cross(clip[1] - clip[0], clip[2] - clip[0]) < 0.0) std::swap(clip[1], clip[2]);
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % 3];
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& p = poly[i];
      const Vec2& q = poly[(i + 1) % poly.size()];
      const double dp = cross(b - a, p - a);
      const double dq = cross(b - a, q - a);
      if (dp >= 0.0) out.push_back(p);
      if ((dp >= 0.0) != (dq >= 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
    }
    poly = std::move(out);
  }
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) area += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * std::abs(area);
}

// Area where `upper` sits on an upward-facing face of `lower`.
double contact_area(const TriangleMesh& lower, const TriangleMesh& upper) {
  double area = 0.0;
  for (Eigen::Index f = 0; f < lower.num_faces(); ++f) {
    const Vec3 n = face_normal(lower, f);
    if (n.z() <= 1e-9) continue;
    const Vec3 u = n.unitOrthogonal();
    const Vec3 v = n.cross(u);
    const Vec3 origin = lower.corner(f, 0);
    auto flat = [&](const Vec3& p) { return Vec2((p - origin).dot(u), (p - origin).dot(v)); };
    const std::array<Vec2, 3> base{flat(lower.corner(f, 0)), flat(lower.corner(f, 1)), flat(lower.corner(f, 2))};
    for (Eigen::Index g = 0; g < upper.num_faces(); ++g) {
      if (face_normal(upper, g).dot(n) > -1.0 + 1e-9) continue;
      bool coplanar = true;
      for (int k = 0; k < 3; ++k) coplanar = coplanar && std::abs((upper.corner(g, k) - origin).dot(n)) < 1e-7;
      if (!coplanar) continue;
      area += overlap_area({flat(upper.corner(g, 0)), flat(upper.corner(g, 1)), flat(upper.corner(g, 2))}, base);
    }
  }
  return area;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

void volume_conservation() {
  const auto t0 = Clock::now();
  const auto corpus = testing::corpus_meshes();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int sequences = 0;
  for (int s = 0; s < 100; ++s) {
    const TriangleMesh& mesh = corpus[static_cast<std::size_t>(s) % corpus.size()];
    const double v = mesh_volume(mesh);
    BspTree tree(mesh);
    for (int attempt = 0; attempt < 40 && tree.cut_count() < 8; ++attempt) {
      const auto ls = leaves(tree);
      const BspLeaf& leaf = ls[rng() % ls.size()];
      InsertResult r = try_insert_cut(tree, testing::random_plane(rng, *leaf.mesh, std::numbers::pi / 4), leaf.id);
      if (r.status == InsertStatus::Inserted) tree = std::move(*r.tree);
    }
    worst = std::max(worst, std::abs(testing::total_leaf_volume(tree) - v) / v);
    ++sequences;
  }
  const double elapsed = seconds_since(t0);
  report(1, worst <= 1e-6 && elapsed < 60.0, "volume conservation",
         fmt::format("{} sequences, worst relative error {:.3g}, {:.1f} s", sequences, worst, elapsed));
}

void constraint_compliance() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TriangleMesh> meshes = testing::corpus_meshes();
  meshes.push_back(make_dome(0.02524, 32, 10));
  int configs = 0;
  int cuts = 0;
  int violations = 0;
  int skipped = 0;
  for (int attempt = 0; attempt < 60 && configs < 24; ++attempt) {
    const TriangleMesh& mesh = meshes[static_cast<std::size_t>(attempt) % meshes.size()];
    const double v = mesh_volume(mesh);
    const int n = 2 + static_cast<int>(rng() % 5);
    const double cap = (1.1 + 0.4 * unit(rng)) * v / n;
    FleetConfig fleet = FleetConfig::make(std::vector<double>(static_cast<std::size_t>(n), cap));
    const ExtruderClearance head{0.02 + 0.08 * unit(rng), 0.05};
    SearchParams params;
    params.sampler = make_sampler_params(16, 5, head, std::numbers::pi / 4, AngleMode::SafeMin);
    params.w_inner = 3;
    params.w_outer = 4;
    try {
      const SearchResult r = plane_cut_search(mesh, fleet, params);
      ++configs;
      for (const auto& c : r.tree.cut_log()) {
        ++cuts;
        if (angle_from_z(c.plane.normal) > params.sampler.phi_max + 1e-9) ++violations;
      }
    } catch (const InfeasibleError&) {
      ++skipped;
    }
  }
  report(2, configs >= 20 && violations == 0, "cut angle compliance (safe-min)",
         fmt::format("{} configs, {} cuts, {} violations, {} infeasible configs skipped", configs, cuts, violations,
                     skipped));
}

struct DomeRun {
  PipelineConfig config;
  std::optional<Decomposition> decomposition;
  std::optional<PrintRun> print;
};

void dome_scenario(DomeRun& run) {
  const auto t0 = Clock::now();
  const TriangleMesh dome = load_pipeline_mesh(run.config);
  const SearchParams& p = run.config.search;
  bool ok = p.sampler.normal_count <= 32 && p.w_inner <= 3 && p.w_outer <= 8;
  std::string detail;
  try {
    run.decomposition.emplace(decompose(dome, run.config));
    const auto volumes = leaf_volumes(run.decomposition->search.tree);
    const double elapsed = seconds_since(t0);
    double lo = 1e9;
    double hi = 0.0;
    for (double x : volumes) {
      lo = std::min(lo, x * 1000.0);
      hi = std::max(hi, x * 1000.0);
    }
    const auto count = static_cast<int>(volumes.size());
    ok = ok && count >= 6 && count <= 12 && hi <= 4.0 && lo >= 1.32 * 0.5 && hi <= 3.85 * 1.5 && elapsed < 300.0 &&
         tree_feasible(volumes, run.config.fleet);
    detail = fmt::format("dome {:.2f} L, {} chunks, volumes {:.3f}..{:.3f} L, {:.1f} s", mesh_volume(dome) * 1000.0,
                         count, lo, hi, elapsed);
  } catch (const InfeasibleError& e) {
    ok = false;
    detail = e.what();
  }
  report(3, ok, "dome scenario", detail);
}

void oracle_equivalence() {
  const TriangleMesh cube = make_unit_cube();
  const std::vector<double> caps{0.6, 0.6};
  FleetConfig fleet = FleetConfig::make(caps);
  SearchParams params;
  params.sampler.normal_count = 4;
  params.sampler.offsets_per_normal = 3;
  params.sampler.phi_max = std::numbers::pi / 4;
  params.w_inner = 4 * 3;
  params.w_outer = 1 << 30;
  params.max_iterations = 10;
  const std::vector<Vec3> normals = sample_normals(params.sampler);

  std::optional<SearchResult> run;
  try {
    run.emplace(plane_cut_search(cube, fleet, params));
  } catch (const Error& e) {
    report(4, false, "beam search matches exhaustive enumeration", e.what());
    return;
  }
  const SearchResult& beam = *run;
  const std::size_t depth = beam.trace.rounds.size();

  // Breadth-first enumeration of every extension of every infeasible tree.
  std::vector<BspTree> level{BspTree(cube)};
  double best = std::numeric_limits<double>::infinity();
  double best_oracle_cv = best;
  std::size_t enumerated = 0;
  for (std::size_t d = 0; d <= depth; ++d) {
    std::vector<BspTree> next;
    for (const BspTree& t : level) {
      const std::vector<BspLeaf> ls = leaves(t);
      std::vector<double> vols;
      for (const auto& l : ls) vols.push_back(l.volume);
      ++enumerated;
      if (oracle_feasible(vols, caps)) {
        if (t.cost() < best) {
          best = t.cost();
          best_oracle_cv = oracle_cv(vols);
        }
        continue;
      }
      if (d == depth) continue;
      std::size_t target = 0;
      for (std::size_t i = 1; i < ls.size(); ++i) {
        if (ls[i].volume > ls[target].volume) target = i;
      }
      for (const Vec3& n : normals) {
        for (const CutPlane& plane : plane_family(*ls[target].mesh, n, 3)) {
          InsertResult r = try_insert_cut(t, plane, ls[target].id);
          if (r.status == InsertStatus::Inserted) next.push_back(std::move(*r.tree));
        }
      }
    }
    level = std::move(next);
  }
  const bool feasible = oracle_feasible(leaf_volumes(beam.tree), caps);
  report(4, feasible && beam.tree.cost() == best && std::abs(best_oracle_cv - best) <= 1e-12,
         "beam search matches exhaustive enumeration",
         fmt::format("depth {}, {} trees enumerated, beam cost {:.17g}, oracle minimum {:.17g}", depth, enumerated,
                     beam.tree.cost(), best));
}

void priority_soundness(const DomeRun& dome) {
  std::vector<BspTree> trees;
  if (dome.decomposition) trees.push_back(dome.decomposition->search.tree);
  std::vector<TriangleMesh> meshes = testing::corpus_meshes();
  meshes.push_back(make_dome(0.02524, 32, 10));
  for (const auto& mesh : meshes) {
    const double v = mesh_volume(mesh);
    for (int n : {3, 5}) {
      SearchParams params;
      params.sampler.normal_count = 16;
      params.sampler.offsets_per_normal = 5;
      params.w_inner = 3;
      params.w_outer = 4;
      try {
        trees.push_back(
            plane_cut_search(mesh, FleetConfig::make(std::vector<double>(static_cast<std::size_t>(n), 1.2 * v / n)), params)
                .tree);
      } catch (const InfeasibleError&) {
      }
    }
  }

  int order_violations = 0;
  int contact_violations = 0;
  int contacts = 0;
  for (const BspTree& tree : trees) {
    const FleetConfig fleet = FleetConfig::make(std::vector<double>(leaves(tree).size(), tree.root_volume()));
    const Schedule schedule = assign_chunks(tree, fleet);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < schedule.entries.size(); ++i) pos[schedule.entries[i].chunk_id] = i;
    for (const auto& [a, b] : dependency_edges(tree)) order_violations += pos.at(a) < pos.at(b) ? 0 : 1;

    const auto ls = leaves(tree);
    for (const auto& a : ls) {
      for (const auto& b : ls) {
        if (a.id == b.id) continue;
        if (contact_area(*a.mesh, *b.mesh) > 1e-9 * std::pow(tree.root_volume(), 2.0 / 3.0)) {
          ++contacts;
          if (pos.at(a.id) > pos.at(b.id)) ++contact_violations;
        }
      }
    }
  }
  report(5, order_violations == 0 && contact_violations == 0 && !trees.empty(), "priority soundness",
         fmt::format("{} decompositions, {} resting contacts, {} dependency violations, {} contact violations",
                     trees.size(), contacts, order_violations, contact_violations));
}

void heuristic_values() {
  const std::vector<double> equal{2, 2, 2};
  const std::vector<double> pair{1, 3};
  const double a = heuristic_cv(equal);
  const double b = heuristic_cv(pair);
  report(6, a == 0.0 && std::abs(b - 0.5) <= 1e-12, "heuristic unit values",
         fmt::format("cv[2,2,2] = {}, cv[1,3] = {:.17g}", a, b));
}

void transform_correctness() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> len(0.0, 0.6);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  double worst = 0.0;
  for (int batch = 0; batch < 10; ++batch) {
    const ExtruderGeometry g{len(rng), len(rng), ang(rng)};
    Trajectory t;
    for (int i = 0; i < 1000; ++i) t.samples.push_back({0.01 * i, Vec3(pos(rng), pos(rng), pos(rng)), ang(rng), true});
    const Trajectory back = end_effector_transform(body_frame_transform(t, g), g);
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      worst = std::max(worst, (back.samples[i].position - t.samples[i].position).norm());
    }
  }
  const ExtruderGeometry vertical{0.3, 0.2, 0.0};
  Trajectory t;
  for (int i = 0; i < 1000; ++i) t.samples.push_back({0.01 * i, Vec3(pos(rng), pos(rng), pos(rng)), ang(rng), true});
  const Trajectory body = body_frame_transform(t, vertical);
  int mismatches = 0;
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const Vec3 expected = t.samples[i].position + Vec3(0.0, 0.0, 0.3 + 0.2);
    mismatches += body.samples[i].position == expected ? 0 : 1;
  }
  report(7, worst <= 1e-9 && mismatches == 0, "frame transform",
         fmt::format("10000 round trips, worst error {:.3g} m; {} vertical-offset mismatches", worst, mismatches));
}

void trajectory_timing(const DomeRun& dome) {
  if (!dome.print) {
    report(8, false, "trajectory timing", "no dome print run");
    return;
  }
  double worst = 0.0;
  for (const auto& c : dome.print->chunks) {
    const double expected = c.toolpath.total_length() / dome.config.print.avg_speed;
    worst = std::max(worst, std::abs(c.end_effector.duration() - expected) / expected);
  }
  report(8, worst <= 1e-6, "trajectory timing",
         fmt::format("{} chunks, worst relative duration error {:.3g}", dome.print->chunks.size(), worst));
}

void simulation_accounting(DomeRun& dome) {
  std::string detail;
  bool ok = false;
  if (dome.decomposition) {
    try {
      dome.print.emplace(print_schedule(dome.decomposition->search.tree, dome.decomposition->schedule, dome.config));
      const SimTrace& trace = dome.print->trace;
      bool within = true;
      for (const auto& [uav, used] : trace.consumption) within = within && used <= trace.capacity.at(uav);
      double worst_gap = 0.0;
      for (const auto& v : dome.print->volumes) worst_gap = std::max(worst_gap, v.relative_gap);
      const double steady = dome.config.print.avg_speed * dome.config.sim.tracking_time_constant;
      const bool complete = trace.chunks.size() == dome.decomposition->schedule.entries.size();
      ok = complete && within && worst_gap <= 0.25 && dome.print->tracking.max_error > steady &&
           dome.config.print.infill_fraction == 1.0 && dome.config.sim.tracking_time_constant == 0.3;
      double peak = 0.0;
      for (const auto& [uav, used] : trace.consumption) peak = std::max(peak, used / trace.capacity.at(uav));
      detail = fmt::format("{} of {} chunks, peak UAV load {:.1f}%, worst volume gap {:.1f}%, max tracking error "
                           "{:.4f} m vs v*tau {:.4f} m",
                           trace.chunks.size(), dome.decomposition->schedule.entries.size(), peak * 100.0,
                           worst_gap * 100.0, dome.print->tracking.max_error, steady);
    } catch (const Error& e) {
      detail = e.what();
    }
  } else {
    detail = "no dome decomposition";
  }
  report(9, ok, "simulation accounting", detail);
}

void determinism(const DomeRun& dome) {
  const fs::path base = testing::scratch_dir("acceptance");
  std::ostringstream log;
  bool ran = true;
  for (const char* name : {"a", "b"}) {
    PipelineConfig cfg = dome.config;
    cfg.output_dir = base / name;
    ran = ran && cmd_decompose(cfg, log) == ExitCode::Ok && cmd_print(cfg, log) == ExitCode::Ok;
  }
  const auto a = ran ? read_tree(base / "a") : std::map<std::string, std::string>{};
  const auto b = ran ? read_tree(base / "b") : std::map<std::string, std::string>{};
  int differing = 0;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    differing += it != b.end() && it->second == bytes ? 0 : 1;
  }
  std::size_t total = 0;
  for (const auto& [name, bytes] : a) total += bytes.size();
  report(10, ran && !a.empty() && a.size() == b.size() && differing == 0, "bit-identical artifacts",
         fmt::format("{} files, {} bytes, {} differing", a.size(), total, differing));
  fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](std::initializer_list<int> ids) {
    if (only.empty()) return true;
    for (int id : ids) {
      if (only.count(id)) return true;
    }
    return false;
  };
  DomeRun dome{dome_config(), {}, {}};
  if (want({1})) volume_conservation();
  if (want({2})) constraint_compliance();
  if (want({3, 5, 8, 9})) dome_scenario(dome);
  if (want({4})) oracle_equivalence();
  if (want({5})) priority_soundness(dome);
  if (want({6})) heuristic_values();
  if (want({7})) transform_correctness();
  if (want({8, 9})) simulation_accounting(dome);
  if (want({8})) trajectory_timing(dome);
  if (want({10})) determinism(dome);
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
