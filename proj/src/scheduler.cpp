#include "aerochunk/scheduler.hpp"

#include "aerochunk/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <numeric>

namespace aerochunk {

namespace {

// Exact bin-packing search over chunks sorted by decreasing volume. Gives up (reports
// infeasible) after `budget` nodes.
class PackingSearch {
 public:
  PackingSearch(std::span<const double> volumes, std::vector<int> order, std::vector<double> remaining,
                std::size_t budget)
      : volumes_(volumes), order_(std::move(order)), remaining_(std::move(remaining)), budget_(budget),
        assignment_(volumes.size(), -1) {}

  std::optional<std::vector<int>> run() {
    if (place(0)) return assignment_;
    return std::nullopt;
  }

 private:
  bool place(std::size_t k) {
    if (k == order_.size()) return true;
    if (budget_ == 0) return false;
    --budget_;
    const int chunk = order_[k];
    const double c = volumes_[chunk];
    std::vector<double> tried;
    for (std::size_t u = 0; u < remaining_.size(); ++u) {
      if (remaining_[u] < c) continue;
      if (std::find(tried.begin(), tried.end(), remaining_[u]) != tried.end()) continue;
      tried.push_back(remaining_[u]);
      remaining_[u] -= c;
      assignment_[chunk] = static_cast<int>(u);
      if (place(k + 1)) return true;
      remaining_[u] += c;
      assignment_[chunk] = -1;
    }
    return false;
  }

  std::span<const double> volumes_;
  std::vector<int> order_;
  std::vector<double> remaining_;
  std::size_t budget_;
  std::vector<int> assignment_;
};

std::vector<int> decreasing_order(std::span<const double> volumes) {
  std::vector<int> order(volumes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return volumes[a] > volumes[b]; });
  return order;
}

// Best fit: the UAV with the smallest remaining capacity that still holds the chunk.
int best_fit(const std::vector<double>& remaining, double volume) {
  int best = -1;
  for (std::size_t u = 0; u < remaining.size(); ++u) {
    if (remaining[u] >= volume && (best < 0 || remaining[u] < remaining[best])) best = static_cast<int>(u);
  }
  return best;
}

}  // namespace

FleetConfig FleetConfig::make(std::vector<double> capacities, std::vector<std::string> ids) {
  if (capacities.empty()) throw ParseError("fleet must contain at least one UAV");
  if (!ids.empty() && ids.size() != capacities.size()) {
    throw ParseError(fmt::format("fleet has {} capacities but {} ids", capacities.size(), ids.size()));
  }
  for (std::size_t i = 0; i < capacities.size(); ++i) {
    if (!(capacities[i] > 0.0)) throw ParseError(fmt::format("UAV {} has non-positive capacity {}", i, capacities[i]));
  }
  if (ids.empty()) {
    for (std::size_t i = 0; i < capacities.size(); ++i) ids.push_back(fmt::format("uav{}", i));
  }
  std::vector<std::size_t> order(capacities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return capacities[a] > capacities[b]; });
  FleetConfig fleet;
  for (std::size_t i : order) {
    fleet.capacities.push_back(capacities[i]);
    fleet.uav_ids.push_back(ids[i]);
  }
  return fleet;
}

double FleetConfig::total_capacity() const { return std::accumulate(capacities.begin(), capacities.end(), 0.0); }

bool check_primal_feasibility(double total_volume, const FleetConfig& fleet) {
  return total_volume <= fleet.total_capacity();
}

std::optional<std::vector<int>> pack_chunks(std::span<const double> chunk_volumes, std::span<const double> capacities,
                                            FeasibilityMode mode) {
  const std::vector<int> order = decreasing_order(chunk_volumes);
  std::vector<double> caps(capacities.begin(), capacities.end());
  std::vector<int> assignment(chunk_volumes.size(), -1);

  if (mode == FeasibilityMode::PerUav) {
    if (chunk_volumes.size() > caps.size()) return std::nullopt;
    // Pair i-th largest chunk with i-th largest UAV.
    std::vector<std::size_t> uavs(caps.size());
    std::iota(uavs.begin(), uavs.end(), 0);
    std::stable_sort(uavs.begin(), uavs.end(), [&](std::size_t a, std::size_t b) { return caps[a] > caps[b]; });
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (caps[uavs[i]] < chunk_volumes[order[i]]) return std::nullopt;
      assignment[order[i]] = static_cast<int>(uavs[i]);
    }
    return assignment;
  }

  const double total = std::accumulate(chunk_volumes.begin(), chunk_volumes.end(), 0.0);
  if (total > std::accumulate(caps.begin(), caps.end(), 0.0)) return std::nullopt;

  std::vector<double> remaining = caps;
  bool ok = true;
  for (int chunk : order) {
    const int u = best_fit(remaining, chunk_volumes[chunk]);
    if (u < 0) {
      ok = false;
      break;
    }
    remaining[u] -= chunk_volumes[chunk];
    assignment[chunk] = u;
  }
  if (ok) return assignment;

  constexpr std::size_t kSearchBudget = 200000;
  return PackingSearch(chunk_volumes, order, caps, kSearchBudget).run();
}

bool tree_feasible(std::span<const double> chunk_volumes, const FleetConfig& fleet, FeasibilityMode mode) {
  if (chunk_volumes.empty()) return true;
  return pack_chunks(chunk_volumes, fleet.capacities, mode).has_value();
}

double Schedule::capacity_of(const std::string& uav) const {
  for (std::size_t i = 0; i < uav_ids.size(); ++i) {
    if (uav_ids[i] == uav) return capacities[i];
  }
  return 0.0;
}

Schedule assign_chunks(const BspTree& tree, const FleetConfig& fleet) {
  const std::vector<BspLeaf> chunks = leaves(tree);
  std::map<std::string, double> volume_of;
  for (const auto& leaf : chunks) volume_of[leaf.id] = leaf.volume;
  const std::vector<std::string> order = inorder_priority(tree);

  std::vector<double> volumes;
  for (const auto& id : order) volumes.push_back(volume_of.at(id));

  std::vector<int> assignment(order.size(), -1);
  bool placed_all = true;
  if (fleet.mode == FeasibilityMode::CapacityReuse) {
    std::vector<double> remaining = fleet.capacities;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const int u = best_fit(remaining, volumes[i]);
      if (u < 0) {
        placed_all = false;
        break;
      }
      remaining[u] -= volumes[i];
      assignment[i] = u;
    }
  } else {
    std::vector<char> used(fleet.size(), 0);
    for (std::size_t i = 0; i < order.size() && placed_all; ++i) {
      int best = -1;
      for (std::size_t u = 0; u < fleet.size(); ++u) {
        if (!used[u] && fleet.capacities[u] >= volumes[i] &&
            (best < 0 || fleet.capacities[u] < fleet.capacities[best])) {
          best = static_cast<int>(u);
        }
      }
      if (best < 0) {
        placed_all = false;
      } else {
        used[best] = 1;
        assignment[i] = best;
      }
    }
  }
  if (!placed_all) {
    auto packed = pack_chunks(volumes, fleet.capacities, fleet.mode);
    if (!packed) {
      std::size_t worst = 0;
      for (std::size_t i = 1; i < volumes.size(); ++i) {
        if (volumes[i] > volumes[worst]) worst = i;
      }
      throw InfeasibleError(fmt::format("no UAV assignment fits chunk '{}' ({} m^3); fleet capacity {} m^3",
                                        order.empty() ? "" : order[worst], volumes.empty() ? 0.0 : volumes[worst],
                                        fleet.total_capacity()));
    }
    assignment = std::move(*packed);
  }

  Schedule schedule;
  schedule.uav_ids = fleet.uav_ids;
  schedule.capacities = fleet.capacities;
  schedule.consumption.assign(fleet.size(), 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int u = assignment[i];
    schedule.entries.push_back({order[i], fleet.uav_ids[u], volumes[i]});
    schedule.consumption[u] += volumes[i];
  }
  schedule.dependencies = dependency_edges(tree);
  return schedule;
}

std::vector<std::string> schedule_violations(const Schedule& schedule) {
  std::vector<std::string> out;
  std::map<std::string, std::size_t> position;
  std::map<std::string, double> used;
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    const auto& e = schedule.entries[i];
    if (!position.emplace(e.chunk_id, i).second) out.push_back(fmt::format("chunk '{}' scheduled twice", e.chunk_id));
    if (std::find(schedule.uav_ids.begin(), schedule.uav_ids.end(), e.uav_id) == schedule.uav_ids.end()) {
      out.push_back(fmt::format("chunk '{}' assigned to unknown UAV '{}'", e.chunk_id, e.uav_id));
    }
    used[e.uav_id] += e.volume;
  }
  for (const auto& [uav, volume] : used) {
    const double cap = schedule.capacity_of(uav);
    if (volume > cap) out.push_back(fmt::format("UAV '{}' assigned {} m^3 over capacity {} m^3", uav, volume, cap));
  }
  for (const auto& [before, after] : schedule.dependencies) {
    auto a = position.find(before);
    auto b = position.find(after);
    if (a == position.end() || b == position.end()) {
      out.push_back(fmt::format("dependency {} -> {} references an unscheduled chunk", before, after));
    } else if (a->second >= b->second) {
      out.push_back(fmt::format("priority violation: '{}' must print before '{}'", before, after));
    }
  }
  return out;
}

}  // namespace aerochunk
