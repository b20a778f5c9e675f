#include "aerochunk/pipeline.hpp"

#include "aerochunk/mesh_io.hpp"
#include "aerochunk/serialize.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <set>
#include <thread>

namespace aerochunk {

namespace fs = std::filesystem;

namespace {

using Json = nlohmann::ordered_json;

constexpr double kStoredVolumeTolerance = 1e-5;  // relative; chunk files hold float32 coordinates

std::string liters(double m3) { return fmt::format("{:.4f} L", m3 * 1000.0); }

std::function<TriangleMesh(const std::string&)> chunk_loader(const fs::path& dir) {
  return [dir](const std::string& id) { return load_mesh_file(dir / "chunks" / chunk_file_name(id), MeshFormat::StlBinary); };
}

}  // namespace

Decomposition decompose(const TriangleMesh& mesh, const PipelineConfig& config) {
  const double volume = mesh_volume(mesh);
  if (!check_primal_feasibility(volume, config.fleet)) {
    throw InfeasibleError(fmt::format("primal infeasible: mesh volume {} exceeds total fleet material {}",
                                      liters(volume), liters(config.fleet.total_capacity())));
  }
  Decomposition d{plane_cut_search(mesh, config.fleet, config.search), {}};
  d.schedule = assign_chunks(d.search.tree, config.fleet);
  return d;
}

void write_decomposition(const Decomposition& d, double phi_max, const fs::path& dir) {
  const fs::path chunks = dir / "chunks";
  fs::create_directories(chunks);
  for (const auto& entry : fs::directory_iterator(chunks)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("chunk_") && name.ends_with(".stl")) fs::remove(entry.path());
  }
  for (const auto& leaf : leaves(d.search.tree)) write_file(chunks / chunk_file_name(leaf.id), to_stl_binary(*leaf.mesh));
  write_file(dir / "bsp.json", bsp_to_json(d.search.tree, phi_max));
  write_file(dir / "schedule.json", schedule_to_json(d.schedule));
  write_file(dir / "search_trace.json", search_trace_to_json(d.search.trace));
}

PrintRun print_schedule(const BspTree& tree, const Schedule& schedule, const PipelineConfig& config) {
  std::vector<std::shared_ptr<const TriangleMesh>> meshes;
  for (const auto& e : schedule.entries) {
    const auto leaf = find_leaf(tree, e.chunk_id);
    if (!leaf) throw Error(fmt::format("schedule references chunk '{}' that is not in the BSP tree", e.chunk_id));
    meshes.push_back(leaf->mesh);
  }

  PrintRun run;
  run.chunks.resize(meshes.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(meshes.size());
  auto work = [&] {
    for (std::size_t i = next++; i < meshes.size(); i = next++) {
      try {
        ChunkPrint& c = run.chunks[i];
        c.chunk_id = schedule.entries[i].chunk_id;
        c.toolpath = slice_chunk(*meshes[i], config.print);
        c.end_effector = toolpath_to_trajectory(c.toolpath, config.print);
        c.body = body_frame_transform(c.end_effector, config.fleet.arm);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    const unsigned hw = config.search.threads > 0 ? static_cast<unsigned>(config.search.threads)
                                                  : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(hw, std::max<std::size_t>(meshes.size(), 1)); ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::map<std::string, Trajectory> trajectories;
  for (const auto& c : run.chunks) trajectories[c.chunk_id] = c.body;
  run.trace = simulate(schedule, trajectories, config.sim);
  run.tracking = tracking_error_report(run.trace);
  run.volumes = deposition_volume_check(run.trace, tree);
  return run;
}

void write_print_run(const PrintRun& run, const PipelineConfig& config, const fs::path& dir) {
  Json chunks = Json::array();
  for (std::size_t i = 0; i < run.chunks.size(); ++i) {
    const ChunkPrint& c = run.chunks[i];
    write_file(dir / "toolpaths" / (c.chunk_id + ".txt"), toolpath_to_text(c.toolpath));
    write_file(dir / "trajectories" / (c.chunk_id + "_nozzle.csv"), trajectory_to_csv(c.end_effector));
    write_file(dir / "trajectories" / (c.chunk_id + "_body.csv"), trajectory_to_csv(c.body));
    const ChunkRun& r = run.trace.chunks[i];
    chunks.push_back({{"chunk", c.chunk_id},
                      {"uav", r.uav_id},
                      {"layers", c.toolpath.layer_count},
                      {"layer_height", c.toolpath.layer_height},
                      {"path_length_m", c.toolpath.total_length()},
                      {"extruded_length_m", c.toolpath.extruded_length()},
                      {"duration_s", c.end_effector.duration()},
                      {"start_time_s", r.start_time},
                      {"completion_time_s", r.completion_time}});
  }
  Json volumes = Json::array();
  for (const auto& v : run.volumes) {
    volumes.push_back({{"chunk", v.chunk_id},
                       {"deposited_l", v.deposited_liters},
                       {"chunk_l", v.chunk_liters},
                       {"relative_gap", v.relative_gap}});
  }
  Json consumption = Json::array();
  for (const auto& [uav, used] : run.trace.consumption) {
    consumption.push_back({{"uav", uav}, {"consumed_l", used * 1000.0}, {"capacity_l", run.trace.capacity.at(uav) * 1000.0}});
  }
  const Json report{{"chunks", chunks},
                    {"tracking",
                     {{"max_error_m", run.tracking.max_error},
                      {"mean_error_m", run.tracking.mean_error},
                      {"rms_error_m", run.tracking.rms_error},
                      {"samples", run.tracking.sample_count},
                      {"time_constant_s", config.sim.tracking_time_constant}}},
                    {"volumes", volumes},
                    {"consumption", consumption},
                    {"deposition_events", run.trace.events.size()}};
  write_file(dir / "sim" / "trace.jsonl", trace_to_jsonl(run.trace));
  write_file(dir / "sim" / "chunks.csv", chunk_summary_csv(run.trace));
  write_file(dir / "sim" / "overlay.csv", overlay_csv(run.tracking));
  write_file(dir / "report.json", report.dump(2) + "\n");
}

VerifyReport verify_artifacts(const fs::path& dir) {
  VerifyReport report;
  auto check = [&report](bool ok, std::string what, std::string detail = {}) {
    if (ok) {
      report.passed.push_back(std::move(what));
    } else {
      report.violations.push_back(detail.empty() ? what : what + ": " + detail);
    }
  };

  const auto load = chunk_loader(dir);
  std::vector<std::string> mesh_failures;
  auto tolerant = [&](const std::string& id) {
    try {
      return load(id);
    } catch (const MeshError& e) {
      mesh_failures.push_back(fmt::format("chunk '{}': {}", id, e.what()));
      return TriangleMesh{};
    }
  };
  const BspDocument doc = bsp_from_json(read_file(dir / "bsp.json"), tolerant);
  const Schedule stored = schedule_from_json(read_file(dir / "schedule.json"));
  const BspTree& tree = doc.tree;

  for (const auto& f : mesh_failures) report.violations.push_back("chunk mesh invalid: " + f);
  if (mesh_failures.empty()) report.passed.push_back("chunk meshes watertight and outward oriented");

  double total = 0.0;
  for (double v : leaf_volumes(tree)) total += v;
  check(std::abs(total - doc.stored_root_volume) <= kStoredVolumeTolerance * doc.stored_root_volume,
        "volume conservation", fmt::format("chunks sum to {}, root volume {}", liters(total), liters(doc.stored_root_volume)));

  std::vector<std::string> steep;
  std::function<void(const BspNode&)> walk = [&](const BspNode& n) {
    if (n.is_leaf()) return;
    const double angle = angle_from_z(n.cut().plane.normal.normalized());
    if (angle > doc.phi_max + 1e-9) {
      steep.push_back(fmt::format("cut '{}' at {:.4f} deg > {:.4f} deg", n.cut().id, angle * 180.0 / std::numbers::pi,
                                  doc.phi_max * 180.0 / std::numbers::pi));
    }
    walk(*n.cut().negative);
    walk(*n.cut().positive);
  };
  walk(*tree.root());
  check(steep.empty(), "cut angles within cap", fmt::format("{}", fmt::join(steep, "; ")));

  std::set<std::string> leaf_ids;
  for (const auto& id : inorder_priority(tree)) leaf_ids.insert(id);
  std::set<std::string> scheduled;
  std::vector<std::string> coverage;
  for (const auto& e : stored.entries) {
    if (!scheduled.insert(e.chunk_id).second) coverage.push_back(fmt::format("'{}' is scheduled twice", e.chunk_id));
    const auto leaf = find_leaf(tree, e.chunk_id);
    if (!leaf) {
      coverage.push_back(fmt::format("'{}' is not a chunk", e.chunk_id));
    } else if (std::abs(leaf->volume - e.volume) > kStoredVolumeTolerance * std::max(e.volume, doc.stored_root_volume * 1e-3)) {
      coverage.push_back(fmt::format("'{}' scheduled as {} but the chunk holds {}", e.chunk_id, liters(e.volume),
                                     liters(leaf->volume)));
    }
  }
  for (const auto& id : leaf_ids) {
    if (!scheduled.contains(id)) coverage.push_back(fmt::format("chunk '{}' is not scheduled", id));
  }
  check(coverage.empty(), "schedule covers every chunk once", fmt::format("{}", fmt::join(coverage, "; ")));

  Schedule against_tree = stored;
  against_tree.dependencies = dependency_edges(tree);
  std::vector<std::string> order;
  std::vector<std::string> capacity;
  for (const auto& v : schedule_violations(against_tree)) {
    (v.find("capacity") != std::string::npos ? capacity : order).push_back(v);
  }
  check(order.empty(), "priority order respects the BSP dependencies", fmt::format("{}", fmt::join(order, "; ")));
  check(capacity.empty(), "per-UAV material within capacity", fmt::format("{}", fmt::join(capacity, "; ")));
  return report;
}

ExitCode cmd_decompose(const PipelineConfig& config, std::ostream& log) {
  const TriangleMesh mesh = load_pipeline_mesh(config);
  log << fmt::format("mesh '{}': {} vertices, {} faces, {}\n", mesh.id, mesh.num_vertices(), mesh.num_faces(),
                     liters(mesh_volume(mesh)));
  std::optional<Decomposition> result;
  try {
    result.emplace(decompose(mesh, config));
  } catch (const SearchExhausted& e) {
    log << "infeasible: " << e.what() << "\n";
    std::vector<std::string> vols;
    for (double v : leaf_volumes(e.best())) vols.push_back(liters(v));
    log << fmt::format("  best chunks: [{}]; fleet capacities:", fmt::join(vols, ", "));
    for (double c : config.fleet.capacities) log << " " << liters(c);
    log << "\n";
    return ExitCode::Infeasible;
  } catch (const InfeasibleError& e) {
    log << "infeasible: " << e.what() << "\n";
    return ExitCode::Infeasible;
  }
  const Decomposition& d = *result;
  write_decomposition(d, config.search.sampler.phi_max, config.output_dir);
  log << fmt::format("{} chunks, cost {:.6f}, {} search rounds\n", d.search.tree.cut_count() + 1, d.search.tree.cost(),
                     d.search.trace.rounds.size());
  for (const auto& e : d.schedule.entries) log << fmt::format("  {} -> {} ({})\n", e.chunk_id, e.uav_id, liters(e.volume));
  log << "artifacts written to " << config.output_dir.string() << "\n";
  return ExitCode::Ok;
}

ExitCode cmd_print(const PipelineConfig& config, std::ostream& log) {
  const fs::path& dir = config.output_dir;
  const BspDocument doc = bsp_from_json(read_file(dir / "bsp.json"), chunk_loader(dir));
  const Schedule schedule = schedule_from_json(read_file(dir / "schedule.json"));
  const PrintRun run = print_schedule(doc.tree, schedule, config);
  write_print_run(run, config, dir);
  for (const auto& v : run.volumes) {
    log << fmt::format("  {}: deposited {:.4f} L of {:.4f} L (gap {:.2f}%)\n", v.chunk_id, v.deposited_liters,
                       v.chunk_liters, v.relative_gap * 100.0);
  }
  log << fmt::format("{} chunks printed in {:.1f} s; tracking error max {:.6f} m, rms {:.6f} m\n", run.trace.chunks.size(),
                     run.trace.chunks.empty() ? 0.0 : run.trace.chunks.back().completion_time, run.tracking.max_error,
                     run.tracking.rms_error);
  return ExitCode::Ok;
}

ExitCode cmd_verify(const fs::path& dir, std::ostream& log) {
  const VerifyReport report = verify_artifacts(dir);
  for (const auto& p : report.passed) log << "ok    " << p << "\n";
  for (const auto& v : report.violations) log << "FAIL  " << v << "\n";
  return report.ok() ? ExitCode::Ok : ExitCode::InvariantViolation;
}

}  // namespace aerochunk
