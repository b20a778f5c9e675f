#include "aerochunk/serialize.hpp"

#include "aerochunk/error.hpp"
#include "aerochunk/heuristic.hpp"

#include <fmt/format.h>
#include <json.hpp>

namespace aerochunk {

namespace {

using Json = nlohmann::ordered_json;

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json plane_json(const CutPlane& p) { return Json{{"normal", vec_json(p.normal)}, {"point", vec_json(p.point)}}; }

CutPlane json_plane(const Json& j) { return CutPlane{json_vec(j.at("normal")), json_vec(j.at("point"))}; }

Json node_json(const BspNode& node) {
  if (node.is_leaf()) {
    const BspLeaf& leaf = node.leaf();
    return Json{{"type", "leaf"}, {"id", leaf.id}, {"volume_l", leaf.volume * 1000.0}, {"file", chunk_file_name(leaf.id)}};
  }
  const BspCut& cut = node.cut();
  return Json{{"type", "cut"},
              {"id", cut.id},
              {"plane", plane_json(cut.plane)},
              {"negative", node_json(*cut.negative)},
              {"positive", node_json(*cut.positive)}};
}

BspNodePtr json_node(const Json& j, const std::string& expected_id,
                     const std::function<TriangleMesh(const std::string&)>& load_leaf) {
  const std::string id = j.at("id").get<std::string>();
  if (id != expected_id) throw ParseError(fmt::format("BSP node id '{}' where '{}' was expected", id, expected_id));
  const std::string type = j.at("type").get<std::string>();
  if (type == "leaf") {
    TriangleMesh mesh = load_leaf(id);
    mesh.id = id;
    const double volume = mesh_volume(mesh);
    return std::make_shared<const BspNode>(
        BspNode{BspLeaf{id, std::make_shared<const TriangleMesh>(std::move(mesh)), volume}});
  }
  if (type != "cut") throw ParseError(fmt::format("BSP node '{}' has unknown type '{}'", id, type));
  BspCut cut{id, json_plane(j.at("plane")), json_node(j.at("negative"), id + "0", load_leaf),
             json_node(j.at("positive"), id + "1", load_leaf)};
  return std::make_shared<const BspNode>(BspNode{std::move(cut)});
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("malformed {}: {}", what, e.what()));
  }
}

}  // namespace

std::string chunk_file_name(const std::string& id) { return "chunk_" + id + ".stl"; }

std::string bsp_to_json(const BspTree& tree, double phi_max) {
  Json cuts = Json::array();
  for (const auto& c : tree.cut_log()) cuts.push_back({{"target", c.target}, {"plane", plane_json(c.plane)}});
  const Json doc{{"root_volume_l", tree.root_volume() * 1000.0},
                 {"cost", tree.cost()},
                 {"phi_max_deg", phi_max * 180.0 / std::numbers::pi},
                 {"chunk_count", tree.cut_count() + 1},
                 {"cuts", cuts},
                 {"root", node_json(*tree.root())}};
  return doc.dump(2) + "\n";
}

BspDocument bsp_from_json(const std::string& text, const std::function<TriangleMesh(const std::string&)>& load_leaf) {
  return guarded("BSP document", [&] {
    const Json doc = Json::parse(text);
    BspNodePtr root = json_node(doc.at("root"), "r", load_leaf);
    std::vector<CutRecord> log;
    for (const auto& c : doc.at("cuts")) log.push_back({json_plane(c.at("plane")), c.at("target").get<std::string>()});
    const double stored = doc.at("root_volume_l").get<double>() / 1000.0;
    std::vector<double> volumes;
    double total = 0.0;
    std::function<void(const BspNode&)> walk = [&](const BspNode& n) {
      if (n.is_leaf()) {
        volumes.push_back(n.leaf().volume);
        total += n.leaf().volume;
        return;
      }
      walk(*n.cut().negative);
      walk(*n.cut().positive);
    };
    walk(*root);
    const double cost = heuristic_cv(volumes);
    BspDocument out{BspTree(std::move(root), stored, cost, std::move(log)),
                    doc.at("phi_max_deg").get<double>() * std::numbers::pi / 180.0, stored};
    return out;
  });
}

std::string schedule_to_json(const Schedule& schedule) {
  Json entries = Json::array();
  for (const auto& e : schedule.entries) {
    entries.push_back({{"chunk", e.chunk_id}, {"uav", e.uav_id}, {"volume_l", e.volume * 1000.0}});
  }
  Json deps = Json::array();
  for (const auto& [a, b] : schedule.dependencies) deps.push_back(Json::array({a, b}));
  Json fleet = Json::array();
  for (std::size_t u = 0; u < schedule.uav_ids.size(); ++u) {
    fleet.push_back({{"id", schedule.uav_ids[u]},
                     {"capacity_l", schedule.capacities[u] * 1000.0},
                     {"consumption_l", schedule.consumption[u] * 1000.0}});
  }
  const Json doc{{"entries", entries}, {"dependencies", deps}, {"fleet", fleet}};
  return doc.dump(2) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
  return guarded("schedule document", [&] {
    const Json doc = Json::parse(text);
    Schedule s;
    for (const auto& e : doc.at("entries")) {
      s.entries.push_back(
          {e.at("chunk").get<std::string>(), e.at("uav").get<std::string>(), e.at("volume_l").get<double>() / 1000.0});
    }
    for (const auto& d : doc.at("dependencies")) {
      s.dependencies.emplace_back(d.at(0).get<std::string>(), d.at(1).get<std::string>());
    }
    for (const auto& f : doc.at("fleet")) {
      s.uav_ids.push_back(f.at("id").get<std::string>());
      s.capacities.push_back(f.at("capacity_l").get<double>() / 1000.0);
      s.consumption.push_back(f.at("consumption_l").get<double>() / 1000.0);
    }
    return s;
  });
}

std::string search_trace_to_json(const SearchTrace& trace) {
  Json rounds = Json::array();
  for (const auto& r : trace.rounds) {
    Json cuts = Json::array();
    for (const auto& c : r.new_cuts) cuts.push_back({{"target", c.target}, {"plane", plane_json(c.plane)}});
    Json feasible = Json::array();
    for (bool f : r.pool_feasible) feasible.push_back(f);
    rounds.push_back({{"iteration", r.iteration}, {"pool_costs", r.pool_costs}, {"pool_feasible", feasible}, {"new_cuts", cuts}});
  }
  return Json{{"rounds", rounds}}.dump(2) + "\n";
}

}  // namespace aerochunk
