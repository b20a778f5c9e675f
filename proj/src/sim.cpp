#include "aerochunk/sim.hpp"

#include "aerochunk/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace aerochunk {

namespace {

double sphere_volume(double r) { return 4.0 / 3.0 * std::numbers::pi * r * r * r; }

// Times at which the reference nozzle has travelled k sphere diameters while extruding.
std::vector<double> deposition_times(const Trajectory& nozzle, double diameter) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nozzle.samples.size(); ++i) {
    if (nozzle.samples[i].extruding) total += (nozzle.samples[i + 1].position - nozzle.samples[i].position).norm();
  }
  const auto count = static_cast<long>(std::floor(total / diameter + 1e-9));
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(std::max(count, 0L)));
  double s0 = 0.0;
  long k = 1;
  for (std::size_t i = 0; i + 1 < nozzle.samples.size() && k <= count; ++i) {
    const auto& a = nozzle.samples[i];
    const auto& b = nozzle.samples[i + 1];
    if (!a.extruding) continue;
    const double length = (b.position - a.position).norm();
    while (k <= count && (k * diameter <= s0 + length || i + 2 == nozzle.samples.size())) {
      const double u = std::clamp((k * diameter - s0) / length, 0.0, 1.0);
      times.push_back(a.time + u * (b.time - a.time));
      ++k;
    }
    s0 += length;
  }
  // Rounding can leave the last events past the final extruding interval.
  while (k <= count) {
    times.push_back(times.empty() ? nozzle.samples.back().time : times.back());
    ++k;
  }
  return times;
}

class Tracker {
 public:
  Tracker(const SimParams& params, const Vec3& start) : params_(params), x_(start), v_(Vec3::Zero()) {}

  const Vec3& position() const { return x_; }

  // Advance by h toward the reference held at `desired` over the step.
  void step(const Vec3& desired, const Vec3& next_desired, double h) {
    const double tau = params_.tracking_time_constant;
    if (tau <= 0.0) {
      x_ = next_desired;
      return;
    }
    if (params_.tracker == TrackerModel::FirstOrder) {
      x_ += std::min(h / tau, 1.0) * (desired - x_);
      return;
    }
    const double zeta = params_.damping_ratio;
    const double omega = 2.0 * zeta / tau;
    const Vec3 a = omega * omega * (desired - x_) - 2.0 * zeta * omega * v_;
    v_ += h * a;
    x_ += h * v_;
  }

  void perturb(const Vec3& d) { x_ += d; }

 private:
  const SimParams& params_;
  Vec3 x_;
  Vec3 v_;
};

}  // namespace

void SimParams::validate() const {
  if (!(dt > 0.0)) throw ParseError(fmt::format("sim dt must be > 0, got {}", dt));
  if (!(tracking_time_constant >= 0.0)) {
    throw ParseError(fmt::format("tracking_time_constant must be >= 0, got {}", tracking_time_constant));
  }
  if (!(damping_ratio > 0.0)) throw ParseError(fmt::format("damping_ratio must be > 0, got {}", damping_ratio));
  if (!(deposition_sphere_radius > 0.0)) {
    throw ParseError(fmt::format("deposition_sphere_radius must be > 0, got {}", deposition_sphere_radius));
  }
  if (!(disturbance_std >= 0.0)) throw ParseError(fmt::format("disturbance_std must be >= 0, got {}", disturbance_std));
  if (extruder.arm_length < 0.0 || extruder.nozzle_length < 0.0) throw ParseError("extruder lengths must be >= 0");
}

double bead_sphere_radius(double line_width, double layer_height) {
  return std::sqrt(3.0 * line_width * layer_height / (2.0 * std::numbers::pi));
}

SimTrace simulate(const Schedule& schedule, const std::map<std::string, Trajectory>& trajectories,
                  const SimParams& params) {
  params.validate();
  SimTrace trace;
  trace.nozzle_offset = nozzle_offset(params.extruder);
  std::map<std::string, double> remaining;
  for (std::size_t u = 0; u < schedule.uav_ids.size(); ++u) {
    trace.capacity[schedule.uav_ids[u]] = schedule.capacities[u];
    trace.consumption[schedule.uav_ids[u]] = 0.0;
    remaining[schedule.uav_ids[u]] = schedule.capacities[u];
  }

  const double radius = params.deposition_sphere_radius;
  const double bead = sphere_volume(radius);
  std::mt19937_64 rng(params.rng_seed);
  std::normal_distribution<double> noise(0.0, params.disturbance_std);
  std::set<std::string> completed;
  double clock = 0.0;

  for (const auto& entry : schedule.entries) {
    for (const auto& [before, after] : schedule.dependencies) {
      if (after == entry.chunk_id && !completed.contains(before)) {
        throw SimulationError(
            fmt::format("chunk '{}' scheduled before its dependency '{}' completed", entry.chunk_id, before));
      }
    }
    const auto found = trajectories.find(entry.chunk_id);
    if (found == trajectories.end()) throw SimulationError(fmt::format("no trajectory for chunk '{}'", entry.chunk_id));
    const Trajectory& body = found->second;
    if (body.frame != Frame::Body) throw SimulationError(fmt::format("trajectory for '{}' is not body-frame", entry.chunk_id));
    if (!remaining.contains(entry.uav_id)) {
      throw SimulationError(fmt::format("chunk '{}' assigned to unknown UAV '{}'", entry.chunk_id, entry.uav_id));
    }

    const int chunk_index = static_cast<int>(trace.chunks.size());
    ChunkRun run{entry.chunk_id, entry.uav_id, clock, clock, 0.0};
    if (body.samples.size() < 2) {
      trace.chunks.push_back(run);
      completed.insert(entry.chunk_id);
      continue;
    }

    const Trajectory nozzle = end_effector_transform(body, params.extruder);
    const std::vector<double> events = deposition_times(nozzle, 2.0 * radius);
    std::size_t next_event = 0;

    const double t0 = body.samples.front().time;
    const double t1 = body.samples.back().time;
    const auto steps = std::max<long>(1, static_cast<long>(std::ceil((t1 - t0) / params.dt - 1e-9)));
    Tracker tracker(params, body.samples.front().position);
    TrajectorySample ref = body.samples.front();
    trace.samples.push_back({clock, chunk_index, ref.position, tracker.position(), ref.yaw, ref.extruding});

    for (long k = 1; k <= steps; ++k) {
      const double t_prev = ref.time;
      const double t = std::min(t0 + static_cast<double>(k) * params.dt, t1);
      const TrajectorySample next = body.at(t);
      const Vec3 before = tracker.position();
      tracker.step(ref.position, next.position, t - t_prev);
      if (params.disturbance_std > 0.0) tracker.perturb(Vec3(noise(rng), noise(rng), noise(rng)));
      const Vec3 after = tracker.position();

      for (; next_event < events.size() && events[next_event] <= t; ++next_event) {
        const double u = t > t_prev ? std::clamp((events[next_event] - t_prev) / (t - t_prev), 0.0, 1.0) : 1.0;
        const double yaw = ref.yaw + u * (next.yaw - ref.yaw);
        const Vec3 position = before + u * (after - before) + nozzle_offset(params.extruder, yaw);
        if (remaining[entry.uav_id] < bead) {
          throw SimulationError(fmt::format("UAV '{}' ran out of material while printing chunk '{}' ({} m^3 used of {})",
                                            entry.uav_id, entry.chunk_id, trace.consumption[entry.uav_id],
                                            trace.capacity[entry.uav_id]));
        }
        remaining[entry.uav_id] -= bead;
        trace.consumption[entry.uav_id] += bead;
        run.deposited += bead;
        trace.events.push_back({clock + events[next_event] - t0, chunk_index, position, bead});
      }
      ref = next;
      trace.samples.push_back({clock + t - t0, chunk_index, next.position, after, next.yaw, next.extruding});
    }

    clock += t1 - t0;
    run.completion_time = clock;
    trace.chunks.push_back(run);
    completed.insert(entry.chunk_id);
  }
  return trace;
}

TrackingReport tracking_error_report(const SimTrace& trace) {
  TrackingReport report;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& s : trace.samples) {
    const double e = (s.desired - s.actual).norm();
    report.max_error = std::max(report.max_error, e);
    sum += e;
    sum_sq += e * e;
    if (s.extruding) {
      const Vec3 offset = Eigen::AngleAxisd(s.yaw, Vec3::UnitZ()) * trace.nozzle_offset;
      const Vec3 d = s.desired + offset;
      const Vec3 a = s.actual + offset;
      report.overlay.push_back({trace.chunks[s.chunk].chunk_id, d.z(), d.head<2>(), a.head<2>()});
    }
  }
  report.sample_count = trace.samples.size();
  if (report.sample_count > 0) {
    report.mean_error = sum / static_cast<double>(report.sample_count);
    report.rms_error = std::sqrt(sum_sq / static_cast<double>(report.sample_count));
  }
  return report;
}

std::vector<ChunkVolumeCheck> deposition_volume_check(const SimTrace& trace, const BspTree& tree) {
  std::vector<ChunkVolumeCheck> out;
  for (const auto& run : trace.chunks) {
    const auto leaf = find_leaf(tree, run.chunk_id);
    ChunkVolumeCheck row;
    row.chunk_id = run.chunk_id;
    row.deposited_liters = run.deposited * 1000.0;
    row.chunk_liters = leaf ? leaf->volume * 1000.0 : 0.0;
    row.relative_gap = row.chunk_liters > 0.0 ? std::abs(row.deposited_liters - row.chunk_liters) / row.chunk_liters : 0.0;
    out.push_back(row);
  }
  return out;
}

std::string trace_to_jsonl(const SimTrace& trace) {
  std::string out;
  auto emit = [&out](const nlohmann::ordered_json& j) { out += j.dump() + "\n"; };
  std::size_t e = 0;
  for (std::size_t c = 0; c < trace.chunks.size(); ++c) {
    const auto& run = trace.chunks[c];
    emit({{"type", "chunk_start"}, {"time", run.start_time}, {"chunk", run.chunk_id}, {"uav", run.uav_id}});
    for (; e < trace.events.size() && trace.events[e].chunk == static_cast<int>(c); ++e) {
      const auto& ev = trace.events[e];
      emit({{"type", "deposit"},
            {"time", ev.time},
            {"chunk", run.chunk_id},
            {"position", {ev.position.x(), ev.position.y(), ev.position.z()}},
            {"volume_l", ev.volume * 1000.0}});
    }
    emit({{"type", "chunk_complete"},
          {"time", run.completion_time},
          {"chunk", run.chunk_id},
          {"uav", run.uav_id},
          {"deposited_l", run.deposited * 1000.0}});
  }
  return out;
}

std::string chunk_summary_csv(const SimTrace& trace) {
  std::string out = "chunk_id,uav_id,start_time,completion_time,deposited_l\n";
  for (const auto& run : trace.chunks) {
    out += fmt::format("{},{},{},{},{}\n", run.chunk_id, run.uav_id, run.start_time, run.completion_time,
                       run.deposited * 1000.0);
  }
  return out;
}

std::string overlay_csv(const TrackingReport& report) {
  std::string out = "chunk_id,layer_z,desired_x,desired_y,actual_x,actual_y\n";
  for (const auto& p : report.overlay) {
    out += fmt::format("{},{},{},{},{},{}\n", p.chunk_id, p.layer_z, p.desired.x(), p.desired.y(), p.actual.x(),
                       p.actual.y());
  }
  return out;
}

}  // namespace aerochunk
