#include "support.hpp"

#include "aerochunk/error.hpp"
#include "aerochunk/heuristic.hpp"

#include <doctest.h>

#include <map>
#include <numbers>

using namespace aerochunk;

namespace {

CutPlane horizontal(double z) { return CutPlane{Vec3::UnitZ(), Vec3(0, 0, z)}; }

}  // namespace

TEST_CASE("uncut tree has one leaf") {
  const BspTree tree(make_unit_cube());
  const auto ls = leaves(tree);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0].id == "r");
  CHECK(ls[0].volume == 1.0);
  CHECK(inorder_priority(tree) == std::vector<std::string>{"r"});
  CHECK(tree.cost() == 0.0);
  CHECK(tree.cut_count() == 0);
  CHECK(dependency_edges(tree).empty());
}

TEST_CASE("single cut") {
  const BspTree tree = insert_cut(BspTree(make_unit_cube()), horizontal(0.5), "r");
  const auto ls = leaves(tree);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0].volume == doctest::Approx(0.5));
  CHECK(ls[1].volume == doctest::Approx(0.5));
  CHECK(inorder_priority(tree) == std::vector<std::string>{"r0", "r1"});
  CHECK(bounding_box(*ls[0].mesh).max().z() == doctest::Approx(0.5));
  CHECK(tree.cost() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dependency_edges(tree) == std::vector<std::pair<std::string, std::string>>{{"r0", "r1"}});
}

TEST_CASE("repeating a cut in the same region fails") {
  const BspTree tree = insert_cut(BspTree(make_unit_cube()), horizontal(0.5), "r");
  CHECK_THROWS_AS(insert_cut(tree, horizontal(0.5), "r0"), CutError);
  CHECK_THROWS_AS(insert_cut(tree, horizontal(0.5), "r1"), CutError);
  CHECK_THROWS_AS(insert_cut(tree, horizontal(0.5), "r"), CutError);
  CHECK_THROWS_AS(insert_cut(tree, horizontal(0.25), "r7"), CutError);
  CHECK(try_insert_cut(tree, horizontal(0.5), "r0").status == InsertStatus::Miss);
  CHECK(try_insert_cut(tree, horizontal(0.9999), "r1").status == InsertStatus::Degenerate);
}

TEST_CASE("three stacked cuts give four quarter slabs bottom to top") {
  BspTree tree(make_unit_cube());
  tree = insert_cut(tree, horizontal(0.25), "r");
  tree = insert_cut(tree, horizontal(0.5), "r1");
  tree = insert_cut(tree, horizontal(0.75), "r11");
  const auto ls = leaves(tree);
  REQUIRE(ls.size() == 4);
  double previous_top = 0.0;
  for (const auto& leaf : ls) {
    CHECK(leaf.volume == doctest::Approx(0.25).epsilon(1e-12));
    const auto box = bounding_box(*leaf.mesh);
    CHECK(box.min().z() == doctest::Approx(previous_top));
    previous_top = box.max().z();
  }
  CHECK(inorder_priority(tree) == std::vector<std::string>{"r0", "r10", "r110", "r111"});
  CHECK(tree.cut_count() == 3);
  CHECK(dependency_edges(tree).size() == 3 + 2 + 1);
}

TEST_CASE("extensions leave the parent untouched") {
  const BspTree parent = insert_cut(BspTree(make_unit_cube()), horizontal(0.5), "r");
  const std::vector<double> before = leaf_volumes(parent);
  const double cost = parent.cost();
  const BspTree a = insert_cut(parent, horizontal(0.75), "r1");
  const BspTree b = insert_cut(parent, CutPlane{Vec3::UnitX(), Vec3(0.3, 0, 0)}, "r1");
  CHECK(leaf_volumes(parent) == before);
  CHECK(parent.cost() == cost);
  CHECK(parent.cut_count() == 1);
  CHECK(a.cut_count() == 2);
  CHECK(b.cut_count() == 2);
  // The untouched negative subtree is shared, the cut leaf is not.
  CHECK(a.root()->cut().negative == parent.root()->cut().negative);
  CHECK(a.root()->cut().positive != parent.root()->cut().positive);
  CHECK(leaf_volumes(a) != leaf_volumes(b));
}

TEST_CASE("random cut sequences conserve volume and keep the tree invariants") {
  std::mt19937_64 rng(11);
  for (const auto& mesh : testing::corpus_meshes()) {
    const double v = mesh_volume(mesh);
    BspTree tree(mesh);
    int inserted = 0;
    for (int attempt = 0; attempt < 60 && inserted < 8; ++attempt) {
      const auto ls = leaves(tree);
      std::uniform_int_distribution<std::size_t> pick(0, ls.size() - 1);
      const BspLeaf& leaf = ls[pick(rng)];
      const CutPlane plane = testing::random_plane(rng, *leaf.mesh, std::numbers::pi / 4);
      InsertResult r = try_insert_cut(tree, plane, leaf.id);
      if (r.status != InsertStatus::Inserted) continue;
      tree = std::move(*r.tree);
      ++inserted;
    }
    CAPTURE(mesh.id);
    CHECK(inserted >= 4);
    CHECK(leaves(tree).size() == tree.cut_count() + 1);
    CHECK(std::abs(testing::total_leaf_volume(tree) - v) <= 1e-6 * v);
    const std::vector<double> vols = leaf_volumes(tree);
    CHECK(tree.cost() == heuristic_cv(vols));

    // Every leaf lies on its recorded side of each ancestor plane.
    for (const auto& leaf : leaves(tree)) {
      CHECK(boundary_edges(*leaf.mesh).empty());
      for (const auto& [plane, positive] : ancestors(tree, leaf.id)) {
        for (Eigen::Index i = 0; i < leaf.mesh->num_vertices(); ++i) {
          const double d = plane.signed_distance(leaf.mesh->vertex(i));
          CHECK((positive ? d >= -1e-7 : d <= 1e-7));
        }
      }
    }

    // In-order priority is a linear extension of the dependencies.
    const auto order = inorder_priority(tree);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& [a, b] : dependency_edges(tree)) CHECK(pos.at(a) < pos.at(b));
  }
}
