#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "nematic/gibbs.hpp"
#include "nematic/polymer_cluster.hpp"

namespace nematic {

using json = nlohmann::json;

/// {"sites": [[x,y], ...]} or {"rect": [w,h]}.
Region region_from_json(const json& j);
json region_to_json(const Region& r);

/// [[x1,y1],[x2,y2]]
Edge edge_from_json(const json& j);
json edge_to_json(const Edge& e);
EdgeSet edges_from_json(const json& j);
json edges_to_json(const EdgeSet& edges);
json edges_to_json(const std::vector<Edge>& edges);

/// {"n": N, "zeta": [...], "incompatible_pairs": [[i,j], ...], "a": [...], "d": [...], "delta": x}
PolymerSystem polymer_system_from_json(const json& j);
json polymer_system_to_json(const PolymerSystem& sys);

/// Rejects any key of `j` outside `allowed` with a ValidationError naming it.
void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where);

/// %.17g
std::string format_double(double x);

}  // namespace nematic
