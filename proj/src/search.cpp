#include "aerochunk/search.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <thread>

namespace aerochunk {

namespace {

struct Candidate {
  std::size_t normal_index;
  std::size_t offset_index;
  BspTree tree;
};

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(1, n);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

std::vector<BspTree> truncate_by_cost(std::vector<BspTree> trees, int width) {
  std::stable_sort(trees.begin(), trees.end(), [](const BspTree& a, const BspTree& b) { return a.cost() < b.cost(); });
  if (static_cast<std::size_t>(width) < trees.size()) trees.erase(trees.begin() + width, trees.end());
  return trees;
}

}  // namespace

void SearchParams::validate() const {
  if (w_inner < 1) throw ParseError(fmt::format("w_inner must be >= 1, got {}", w_inner));
  if (w_outer < 1) throw ParseError(fmt::format("w_outer must be >= 1, got {}", w_outer));
  if (max_iterations < 1) throw ParseError(fmt::format("max_iterations must be >= 1, got {}", max_iterations));
  sampler.validate();
}

std::optional<std::string> extension_target(const BspTree& tree, const FleetConfig& fleet) {
  const std::vector<BspLeaf> chunks = leaves(tree);
  std::vector<double> volumes;
  for (const auto& l : chunks) volumes.push_back(l.volume);
  if (tree_feasible(volumes, fleet)) return std::nullopt;

  // Largest leaf; ties go to the earlier leaf in print order.
  std::size_t largest = 0;
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    if (chunks[i].volume > chunks[largest].volume) largest = i;
  }
  return chunks[largest].id;
}

std::vector<BspTree> evaluate_extensions(const BspTree& tree, const std::string& target, const SearchParams& params) {
  const auto leaf = find_leaf(tree, target);
  if (!leaf) return {};
  const std::vector<Vec3> normals = sample_normals(params.sampler);

  std::vector<std::vector<Candidate>> per_normal(normals.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < normals.size(); i = next++) {
      const auto planes = plane_family(*leaf->mesh, normals[i], params.sampler.offsets_per_normal);
      for (std::size_t j = 0; j < planes.size(); ++j) {
        InsertResult r = try_insert_cut(tree, planes[j], target);
        if (r.status == InsertStatus::Inserted) per_normal[i].push_back({i, j, std::move(*r.tree)});
      }
    }
  };
  const int workers = worker_count(params.threads, normals.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Merge in (normal, offset) order so the stable sort breaks cost ties deterministically.
  std::vector<BspTree> merged;
  for (auto& bucket : per_normal) {
    for (auto& c : bucket) merged.push_back(std::move(c.tree));
  }
  return truncate_by_cost(std::move(merged), params.w_inner);
}

SearchResult plane_cut_search(const TriangleMesh& mesh, const FleetConfig& fleet, const SearchParams& params) {
  params.validate();
  const double volume = mesh_volume(mesh);
  if (!check_primal_feasibility(volume, fleet)) {
    throw InfeasibleError(fmt::format("mesh volume {} m^3 exceeds total fleet capacity {} m^3", volume,
                                      fleet.total_capacity()));
  }

  SearchTrace trace;
  std::vector<BspTree> pool{BspTree(mesh)};
  auto feasible = [&](const BspTree& t) { return !extension_target(t, fleet).has_value(); };

  for (int iteration = 0;; ++iteration) {
    std::vector<BspTree> done;
    std::vector<BspTree> open;
    for (auto& t : pool) (feasible(t) ? done : open).push_back(std::move(t));

    if (open.empty()) {
      auto best = std::min_element(done.begin(), done.end(),
                                   [](const BspTree& a, const BspTree& b) { return a.cost() < b.cost(); });
      return SearchResult{*best, std::move(trace)};
    }
    if (iteration >= params.max_iterations) {
      const BspTree best = truncate_by_cost(open, 1).front();
      throw SearchExhausted(fmt::format("search did not reach a feasible decomposition within {} iterations "
                                        "(best infeasible tree: {} chunks, cost {})",
                                        params.max_iterations, best.cut_count() + 1, best.cost()),
                            best, std::move(trace));
    }

    std::vector<BspTree> fresh;
    for (const BspTree& t : open) {
      const std::string target = *extension_target(t, fleet);
      for (auto& ext : evaluate_extensions(t, target, params)) fresh.push_back(std::move(ext));
    }
    fresh = truncate_by_cost(std::move(fresh), params.w_outer);

    SearchRound round;
    round.iteration = iteration;
    for (const auto& t : fresh) round.new_cuts.push_back(t.cut_log().back());

    pool = std::move(done);
    for (auto& t : fresh) pool.push_back(std::move(t));
    for (const auto& t : pool) {
      round.pool_costs.push_back(t.cost());
      round.pool_feasible.push_back(feasible(t));
    }
    trace.rounds.push_back(std::move(round));

    if (pool.empty()) {
      const BspTree best = truncate_by_cost(open, 1).front();
      throw SearchExhausted("no valid cut extends the remaining infeasible trees", best, std::move(trace));
    }
  }
}

}  // namespace aerochunk
