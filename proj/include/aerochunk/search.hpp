#pragma once

#include "aerochunk/bsp.hpp"
#include "aerochunk/error.hpp"
#include "aerochunk/heuristic.hpp"
#include "aerochunk/sampler.hpp"
#include "aerochunk/scheduler.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aerochunk {

struct SearchParams {
  int w_inner = 3;  ///< extensions kept per expanded tree
  int w_outer = 8;  ///< new trees kept per round
  SamplerParams sampler;
  int max_iterations = 32;
  int threads = 0;  ///< 0: hardware concurrency

  void validate() const;
};

struct SearchRound {
  int iteration = 0;
  std::vector<double> pool_costs;  ///< pool after the round, in pool order
  std::vector<bool> pool_feasible;
  std::vector<CutRecord> new_cuts;  ///< last cut of each tree added this round
};

struct SearchTrace {
  std::vector<SearchRound> rounds;
};

struct SearchResult {
  BspTree tree;
  SearchTrace trace;
};

/// The search ran out of iterations (or extensions) before every pooled tree became feasible.
class SearchExhausted : public InfeasibleError {
 public:
  SearchExhausted(std::string what, BspTree best, SearchTrace trace)
      : InfeasibleError(std::move(what)), best_(std::move(best)), trace_(std::move(trace)) {}
  const BspTree& best() const { return best_; }
  const SearchTrace& trace() const { return trace_; }

 private:
  BspTree best_;
  SearchTrace trace_;
};

/// Leaf the search extends next, or nothing when the tree is feasible for the fleet. The
/// largest leaf exceeding the largest capacity is chosen; when every leaf fits a UAV on its
/// own but the set cannot be packed, the largest leaf is chosen.
std::optional<std::string> extension_target(const BspTree& tree, const FleetConfig& fleet);

/// Every non-degenerate cut of `target` over the sampled normals and their plane families,
/// best `w_inner` by cost (ties keep normal-then-offset order).
std::vector<BspTree> evaluate_extensions(const BspTree& tree, const std::string& target, const SearchParams& params);

/// Beam search over BSP extensions until every pooled tree is feasible; returns the cheapest.
/// Throws InfeasibleError when the fleet cannot carry the mesh at all and SearchExhausted
/// when max_iterations passes without convergence.
SearchResult plane_cut_search(const TriangleMesh& mesh, const FleetConfig& fleet, const SearchParams& params);

}  // namespace aerochunk
