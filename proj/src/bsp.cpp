#include "aerochunk/bsp.hpp"

#include "aerochunk/error.hpp"
#include "aerochunk/heuristic.hpp"
#include "aerochunk/slice.hpp"

#include <fmt/format.h>

namespace aerochunk {

namespace {

constexpr char kRootId[] = "r";

BspNodePtr make_leaf(std::string id, TriangleMesh mesh) {
  mesh.id = id;
  const double volume = mesh_volume(mesh);
  return std::make_shared<const BspNode>(
      BspNode{BspLeaf{std::move(id), std::make_shared<const TriangleMesh>(std::move(mesh)), volume}});
}

// Walk the id path; null when the id does not name an existing leaf.
const BspNode* locate(const BspNodePtr& root, const std::string& id) {
  if (id.empty() || id[0] != kRootId[0]) return nullptr;
  const BspNode* node = root.get();
  for (std::size_t i = 1; i < id.size(); ++i) {
    if (node->is_leaf()) return nullptr;
    const BspCut& cut = node->cut();
    if (id[i] == '0') {
      node = cut.negative.get();
    } else if (id[i] == '1') {
      node = cut.positive.get();
    } else {
      return nullptr;
    }
  }
  return node;
}

BspNodePtr replace_path(const BspNodePtr& node, const std::string& id, std::size_t depth, BspNodePtr replacement) {
  if (depth == id.size()) return replacement;
  const BspCut& cut = node->cut();
  BspCut copy = cut;
  if (id[depth] == '0') {
    copy.negative = replace_path(cut.negative, id, depth + 1, std::move(replacement));
  } else {
    copy.positive = replace_path(cut.positive, id, depth + 1, std::move(replacement));
  }
  return std::make_shared<const BspNode>(BspNode{std::move(copy)});
}

template <typename Visit>
void inorder(const BspNode& node, Visit&& visit) {
  if (node.is_leaf()) {
    visit(node.leaf());
    return;
  }
  inorder(*node.cut().negative, visit);
  inorder(*node.cut().positive, visit);
}

void collect(const BspNode& node, std::vector<std::string>& out) {
  inorder(node, [&](const BspLeaf& leaf) { out.push_back(leaf.id); });
}

void collect_dependencies(const BspNode& node, std::vector<std::pair<std::string, std::string>>& edges) {
  if (node.is_leaf()) return;
  const BspCut& cut = node.cut();
  std::vector<std::string> below, above;
  collect(*cut.negative, below);
  collect(*cut.positive, above);
  for (const auto& b : above) {
    for (const auto& a : below) edges.emplace_back(a, b);
  }
  collect_dependencies(*cut.negative, edges);
  collect_dependencies(*cut.positive, edges);
}

}  // namespace

BspTree::BspTree(TriangleMesh mesh) {
  root_ = make_leaf(kRootId, std::move(mesh));
  root_volume_ = root_->leaf().volume;
  cost_ = 0.0;
}

BspTree::BspTree(BspNodePtr root, double root_volume, double cost, std::vector<CutRecord> cut_log)
    : root_(std::move(root)), root_volume_(root_volume), cost_(cost), cut_log_(std::move(cut_log)) {}

InsertResult try_insert_cut(const BspTree& tree, const CutPlane& plane, const std::string& target) {
  InsertResult result;
  const BspNode* node = locate(tree.root(), target);
  if (node == nullptr || !node->is_leaf()) {
    result.status = InsertStatus::UnknownLeaf;
    return result;
  }
  const BspLeaf& leaf = node->leaf();
  SliceResult parts = slice_mesh(*leaf.mesh, plane, SliceOptions{tree.min_chunk_volume(), kPlaneSnapTolerance});
  if (parts.status == SliceStatus::Miss) {
    result.status = InsertStatus::Miss;
    return result;
  }
  if (parts.status == SliceStatus::Degenerate) {
    result.status = InsertStatus::Degenerate;
    return result;
  }

  BspCut cut{target, plane, make_leaf(target + "0", std::move(*parts.negative)),
             make_leaf(target + "1", std::move(*parts.positive))};
  BspNodePtr root = replace_path(tree.root(), target, 1, std::make_shared<const BspNode>(BspNode{std::move(cut)}));

  std::vector<double> volumes;
  inorder(*root, [&](const BspLeaf& l) { volumes.push_back(l.volume); });
  std::vector<CutRecord> log = tree.cut_log();
  log.push_back({plane, target});
  result.status = InsertStatus::Inserted;
  result.tree.emplace(std::move(root), tree.root_volume(), heuristic_cv(volumes), std::move(log));
  return result;
}

BspTree insert_cut(const BspTree& tree, const CutPlane& plane, const std::string& target) {
  InsertResult r = try_insert_cut(tree, plane, target);
  switch (r.status) {
    case InsertStatus::Inserted: return std::move(*r.tree);
    case InsertStatus::UnknownLeaf: throw CutError(fmt::format("no leaf with id '{}'", target));
    case InsertStatus::Miss: throw CutError(fmt::format("plane misses leaf '{}'", target));
    case InsertStatus::Degenerate:
      throw CutError(fmt::format("cut of leaf '{}' leaves a part below {} m^3", target, tree.min_chunk_volume()));
  }
  throw CutError("unreachable");
}

std::vector<BspLeaf> leaves(const BspTree& tree) {
  std::vector<BspLeaf> out;
  inorder(*tree.root(), [&](const BspLeaf& l) { out.push_back(l); });
  return out;
}

std::vector<double> leaf_volumes(const BspTree& tree) {
  std::vector<double> out;
  inorder(*tree.root(), [&](const BspLeaf& l) { out.push_back(l.volume); });
  return out;
}

std::vector<std::string> inorder_priority(const BspTree& tree) {
  std::vector<std::string> out;
  collect(*tree.root(), out);
  return out;
}

std::optional<BspLeaf> find_leaf(const BspTree& tree, const std::string& id) {
  const BspNode* node = locate(tree.root(), id);
  if (node == nullptr || !node->is_leaf()) return std::nullopt;
  return node->leaf();
}

std::vector<std::pair<CutPlane, bool>> ancestors(const BspTree& tree, const std::string& id) {
  std::vector<std::pair<CutPlane, bool>> out;
  const BspNode* node = tree.root().get();
  for (std::size_t i = 1; i < id.size() && node && !node->is_leaf(); ++i) {
    const BspCut& cut = node->cut();
    const bool positive = id[i] == '1';
    out.emplace_back(cut.plane, positive);
    node = positive ? cut.positive.get() : cut.negative.get();
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> dependency_edges(const BspTree& tree) {
  std::vector<std::pair<std::string, std::string>> edges;
  collect_dependencies(*tree.root(), edges);
  return edges;
}

}  // namespace aerochunk
