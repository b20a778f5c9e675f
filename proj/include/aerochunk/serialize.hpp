#pragma once

#include "aerochunk/bsp.hpp"
#include "aerochunk/scheduler.hpp"
#include "aerochunk/search.hpp"

#include <functional>
#include <string>

namespace aerochunk {

/// Nested node document. Leaves carry their id, volume in liters and chunk file name;
/// cuts carry the plane. The header records the root volume, the cost, the sampling cap
/// and the cut log.
std::string bsp_to_json(const BspTree& tree, double phi_max);

struct BspDocument {
  BspTree tree;
  double phi_max = 0.0;
  double stored_root_volume = 0.0;  ///< m^3 as written
};

/// Rebuild a tree; leaf meshes come from `load_leaf(id)` and leaf volumes are recomputed
/// from them. Throws ParseError on malformed documents.
BspDocument bsp_from_json(const std::string& text, const std::function<TriangleMesh(const std::string&)>& load_leaf);

/// Chunk file name for a leaf id.
std::string chunk_file_name(const std::string& id);

std::string schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const std::string& text);

std::string search_trace_to_json(const SearchTrace& trace);

}  // namespace aerochunk
