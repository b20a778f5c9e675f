#pragma once

#include "aerochunk/mesh.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace aerochunk {

struct BspNode;
using BspNodePtr = std::shared_ptr<const BspNode>;

/// A chunk. Ids are the path from the root: "r" for the root, then '0' for each step into a
/// negative child and '1' for each step into a positive child.
struct BspLeaf {
  std::string id;
  std::shared_ptr<const TriangleMesh> mesh;
  double volume = 0.0;
};

struct BspCut {
  std::string id;
  CutPlane plane;
  BspNodePtr negative;
  BspNodePtr positive;
};

struct BspNode {
  std::variant<BspLeaf, BspCut> content;

  bool is_leaf() const { return std::holds_alternative<BspLeaf>(content); }
  const BspLeaf& leaf() const { return std::get<BspLeaf>(content); }
  const BspCut& cut() const { return std::get<BspCut>(content); }
};

struct CutRecord {
  CutPlane plane;
  std::string target;
};

/// Immutable binary space partition of a mesh. Extending a tree copies only the path to the
/// cut leaf; untouched subtrees are shared between the parent and all its extensions.
class BspTree {
 public:
  /// Fraction of the root volume below which a cut part counts as degenerate.
  static constexpr double kMinChunkFraction = 1e-3;

  explicit BspTree(TriangleMesh mesh);
  BspTree(BspNodePtr root, double root_volume, double cost, std::vector<CutRecord> cut_log);

  const BspNodePtr& root() const { return root_; }
  double root_volume() const { return root_volume_; }
  double min_chunk_volume() const { return kMinChunkFraction * root_volume_; }
  /// Volume-dispersion cost of the current leaves.
  double cost() const { return cost_; }
  const std::vector<CutRecord>& cut_log() const { return cut_log_; }
  std::size_t cut_count() const { return cut_log_.size(); }

 private:
  BspNodePtr root_;
  double root_volume_ = 0.0;
  double cost_ = 0.0;
  std::vector<CutRecord> cut_log_;
};

enum class InsertStatus { Inserted, UnknownLeaf, Miss, Degenerate };

struct InsertResult {
  InsertStatus status = InsertStatus::UnknownLeaf;
  std::optional<BspTree> tree;
};

/// Non-throwing cut insertion used by the search loop.
InsertResult try_insert_cut(const BspTree& tree, const CutPlane& plane, const std::string& target);

/// Replace leaf `target` by a cut node with the negative part on the left and the positive
/// part on the right. Throws CutError when the leaf is unknown, missed, or the cut is degenerate.
BspTree insert_cut(const BspTree& tree, const CutPlane& plane, const std::string& target);

/// Leaves in in-order (negative subtree first).
std::vector<BspLeaf> leaves(const BspTree& tree);
std::vector<double> leaf_volumes(const BspTree& tree);

/// Leaf ids in print order: for every cut, all negative-side chunks precede positive-side ones.
std::vector<std::string> inorder_priority(const BspTree& tree);

std::optional<BspLeaf> find_leaf(const BspTree& tree, const std::string& id);

/// Cut planes from root to the leaf, with true when the leaf is on the plane's positive side.
std::vector<std::pair<CutPlane, bool>> ancestors(const BspTree& tree, const std::string& id);

/// For every cut node, each leaf under the positive child depends on every leaf under the
/// negative child. Pairs are (prerequisite, dependent).
std::vector<std::pair<std::string, std::string>> dependency_edges(const BspTree& tree);

}  // namespace aerochunk
