#include "nematic/io.hpp"

#include <algorithm>
#include <cstdio>

#include "nematic/error.hpp"

namespace nematic {

namespace {

Site site_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ValidationError("cli", "a site is written [x, y] with integer coordinates");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

json site_to_json(Site s) { return json::array({s.x, s.y}); }

}  // namespace

Region region_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("cli", "a region is a JSON object");
  require_keys(j, {"sites", "rect"}, "region");
  if (j.contains("rect") == j.contains("sites")) {
    throw ValidationError("cli", "a region needs exactly one of \"rect\" and \"sites\"");
  }
  if (j.contains("rect")) {
    const json& r = j["rect"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      throw ValidationError("cli", "\"rect\" is [w, h]");
    }
    const int w = r[0].get<int>(), h = r[1].get<int>();
    if (w < 0 || h < 0) throw ValidationError("cli", "\"rect\" dimensions must be non-negative");
    return Region::rectangle(w, h);
  }
  if (!j["sites"].is_array()) throw ValidationError("cli", "\"sites\" is a list of [x, y]");
  std::vector<Site> sites;
  for (const json& s : j["sites"]) sites.push_back(site_from_json(s));
  return Region(std::move(sites));
}

json region_to_json(const Region& r) {
  json sites = json::array();
  for (Site s : r) sites.push_back(site_to_json(s));
  return {{"sites", sites}};
}

Edge edge_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("cli", "an edge is written [[x1, y1], [x2, y2]]");
  return Edge(site_from_json(j[0]), site_from_json(j[1]));
}

json edge_to_json(const Edge& e) { return json::array({site_to_json(e.a()), site_to_json(e.b())}); }

EdgeSet edges_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("cli", "expected a list of edges");
  EdgeSet out;
  for (const json& e : j) out.insert(edge_from_json(e));
  return out;
}

json edges_to_json(const EdgeSet& edges) { return edges_to_json(std::vector<Edge>(edges.begin(), edges.end())); }

json edges_to_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back(edge_to_json(e));
  return out;
}

PolymerSystem polymer_system_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("cli", "a polymer system is a JSON object");
  require_keys(j, {"n", "zeta", "incompatible_pairs", "a", "d", "delta"}, "polymer system");
  if (!j.contains("zeta")) throw ValidationError("cli", "polymer system needs \"zeta\"");
  auto zeta = j["zeta"].get<std::vector<double>>();
  if (j.contains("n") && j["n"].get<std::size_t>() != zeta.size()) {
    throw ValidationError("cli", "\"n\" does not match the number of activities");
  }
  std::vector<std::pair<int, int>> pairs;
  for (const json& p : j.value("incompatible_pairs", json::array())) {
    if (!p.is_array() || p.size() != 2) throw ValidationError("cli", "incompatible pairs are [i, j]");
    pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  return PolymerSystem(std::move(zeta), pairs, j.value("a", std::vector<double>{}), j.value("d", std::vector<double>{}),
                       j.value("delta", 0.5));
}

json polymer_system_to_json(const PolymerSystem& sys) {
  json zeta = json::array(), a = json::array(), d = json::array(), pairs = json::array();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    zeta.push_back(sys.zeta(i));
    a.push_back(sys.a(i));
    d.push_back(sys.d(i));
  }
  for (auto [i, k] : sys.incompatible_pairs()) pairs.push_back({i, k});
  return {{"n", sys.size()}, {"zeta", zeta}, {"incompatible_pairs", pairs}, {"a", a}, {"d", d}, {"delta", sys.delta()}};
}

void require_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("cli", "unknown key \"" + key + "\" in " + where);
    }
  }
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace nematic
