#include "nematic/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nematic/error.hpp"
#include "nematic/logsum.hpp"

namespace nematic {

Region support_of(const DimerConfiguration& config, Orientation c) {
  std::vector<Site> s;
  for (const Edge& e : config) {
    if (e.orientation() != c) continue;
    s.push_back(e.a());
    s.push_back(e.b());
  }
  return Region(std::move(s));
}

std::vector<Region> outer_loops(const Region& support) {
  std::vector<Region> hulls;
  for (const Region& comp : connected_components(support)) hulls.push_back(fill_holes(comp));
  std::vector<Region> out;
  for (std::size_t i = 0; i < hulls.size(); ++i) {
    bool inside = false;
    for (std::size_t j = 0; j < hulls.size() && !inside; ++j) {
      inside = i != j && hulls[i].is_subset_of(hulls[j]);
    }
    if (!inside) out.push_back(hulls[i]);
  }
  return out;
}

Loop::Loop(Region interior, Orientation index) : interior_(std::move(interior)), index_(index) {
  if (interior_.empty()) throw ValidationError("decomposition", "loop interior is empty");
  if (connected_components(interior_).size() != 1) {
    throw ValidationError("decomposition", "loop interior must be 4-connected");
  }
  if (!is_simply_connected(interior_)) throw ValidationError("decomposition", "loop interior must be simply connected");
}

namespace {

int line_of(Site p, Orientation c) { return c == Orientation::v ? p.x : p.y; }
int pos_of(Site p, Orientation c) { return c == Orientation::v ? p.y : p.x; }

// Endpoints of the c-edges of ∂interior, bucketed by c-line.
std::map<int, std::vector<int>> endpoints_by_line(const Region& interior, Orientation c) {
  std::map<int, std::vector<int>> out;
  for (const Edge& e : boundary(interior, c)) {
    for (Site p : {e.a(), e.b()}) out[line_of(p, c)].push_back(pos_of(p, c));
  }
  return out;
}

long line_distance(const std::map<int, std::vector<int>>& ends, Site x, Orientation c) {
  auto it = ends.find(line_of(x, c));
  if (it == ends.end()) return std::numeric_limits<long>::max();
  long best = std::numeric_limits<long>::max();
  for (int p : it->second) best = std::min<long>(best, std::abs(p - pos_of(x, c)));
  return best;
}

std::set<Site> source_sites(const SourceSet& sources) {
  std::set<Site> s;
  for (const Edge& e : sources) {
    s.insert(e.a());
    s.insert(e.b());
  }
  return s;
}

}  // namespace

Region core(const Region& interior, Orientation c, const SourceSet& sources) {
  const auto along = endpoints_by_line(interior, c);
  const auto across = endpoints_by_line(interior, opposite(c));
  const auto src = source_sites(sources);
  std::vector<Site> out;
  for (Site x : interior) {
    if (src.count(x)) continue;
    if (line_distance(along, x, c) >= 2 && line_distance(across, x, opposite(c)) >= 1) out.push_back(x);
  }
  return Region(std::move(out));
}

Region mantle(const Region& interior, Orientation c) { return interior - core(interior, c); }

std::optional<DimerConfiguration> mantle_tiling(const Region& interior, Orientation c) {
  EdgeSet dimers;
  for (const Segment& s : segments(mantle(interior, c), c)) {
    if (s.size() % 2 != 0) return std::nullopt;
    for (std::size_t i = 0; i < s.size(); i += 2) dimers.insert(Edge(s.sites[i], s.sites[i + 1]));
  }
  return DimerConfiguration(std::move(dimers));
}

bool is_bounding(const Region& interior, Orientation c, const SourceSet& sources) {
  const Region m = mantle(interior, c);
  for (Site p : source_sites(sources))
    if (m.contains(p)) return false;
  return mantle_tiling(interior, c).has_value();
}

namespace {

int source_contacts(const DimerConfiguration& tiling, const SourceSet& sources) {
  int n = 0;
  for (const Edge& d : tiling)
    for (const Edge& s : sources) n += interacts(d, s);
  return n;
}

DimerConfiguration require_tiling(const Loop& l) {
  auto t = mantle_tiling(l.interior(), l.index());
  if (!t) throw StructuralError("decomposition", "mantle of the loop cannot be close-packed by " +
                                                     std::string(to_string(l.index())) + "-dimers");
  return *t;
}

}  // namespace

double log_mantle_weight(const Loop& l, const ModelParams& p, const SourceSet& sources) {
  const DimerConfiguration t = require_tiling(l);
  return log_weight(t, p, BoundaryCondition{l.index(), {}, 0}) + p.J * source_contacts(t, sources);
}

double log_mantle_weight_closed_form(const Loop& l, const ModelParams& p, const SourceSet& sources) {
  const DimerConfiguration t = require_tiling(l);
  const Region m = mantle(l);
  const double half = 0.5 * static_cast<double>(m.size());
  const double bc = 0.5 * static_cast<double>(boundary(m, l.index()).size());
  return half * (std::log(p.z) + p.J) - p.J * bc + p.J * source_contacts(t, sources);
}

// ---------------------------------------------------------------------------

std::vector<Loop> LoopFamily::key() const {
  std::vector<Loop> k(loops);
  std::sort(k.begin(), k.end());
  return k;
}

bool LoopFamily::is_alternating() const {
  for (std::size_t i = 0; i < loops.size(); ++i) {
    const Orientation above = parent[i] < 0 ? root : loops[parent[i]].index();
    if (loops[i].index() != opposite(above)) return false;
  }
  return true;
}

bool LoopFamily::is_disjoint() const {
  std::vector<std::vector<Edge>> edges;
  std::vector<Region> mantles;
  for (const Loop& l : loops) {
    edges.push_back(l.edges());
    mantles.push_back(mantle(l));
  }
  for (std::size_t i = 0; i < loops.size(); ++i) {
    for (std::size_t j = i + 1; j < loops.size(); ++j) {
      std::vector<Edge> common;
      std::set_intersection(edges[i].begin(), edges[i].end(), edges[j].begin(), edges[j].end(),
                            std::back_inserter(common));
      if (!common.empty() || mantles[i].intersects(mantles[j])) return false;
    }
  }
  return true;
}

std::vector<int> inclusion_parents(const std::vector<Loop>& loops) {
  std::vector<int> parent(loops.size(), -1);
  for (std::size_t i = 0; i < loops.size(); ++i) {
    for (std::size_t j = 0; j < loops.size(); ++j) {
      if (i == j || loops[i].interior() == loops[j].interior()) continue;
      if (!loops[i].interior().is_subset_of(loops[j].interior())) continue;
      if (parent[i] < 0 || loops[j].interior().size() < loops[parent[i]].interior().size()) {
        parent[i] = static_cast<int>(j);
      }
    }
  }
  return parent;
}

namespace {

void build_into(const EdgeSet& dimers, Orientation q, int parent, const SourceSet& sources, LoopFamily& family) {
  std::vector<Site> s;
  for (const Edge& e : dimers) {
    if (e.orientation() == q) continue;
    s.push_back(e.a());
    s.push_back(e.b());
  }
  if (s.empty()) return;
  const Orientation c = opposite(q);
  for (Region& hull : outer_loops(Region(std::move(s)))) {
    if (!is_bounding(hull, c, sources)) {
      throw StructuralError("decomposition", "extracted loop is not " + std::string(to_string(c)) + "-bounding");
    }
    EdgeSet inside;
    for (const Edge& e : dimers)
      if (hull.contains(e)) inside.insert(e);
    family.loops.emplace_back(std::move(hull), c);
    family.parent.push_back(parent);
    build_into(inside, c, static_cast<int>(family.loops.size()) - 1, sources, family);
  }
}

}  // namespace

LoopFamily build_loop_family(const DimerConfiguration& config, Orientation q, const SourceSet& sources) {
  LoopFamily f;
  f.root = q;
  build_into(config.dimers(), q, -1, sources, f);
  return f;
}

Region exterior(const Region& region, const LoopFamily& family, const SourceSet& sources) {
  const auto src = source_sites(sources);
  Region out = region - Region(std::vector<Site>(src.begin(), src.end()));
  for (const Loop& l : family.loops) out = out - l.interior();
  return out;
}

Region padding(const LoopFamily& family, std::size_t i, const SourceSet& sources) {
  Region out = core(family.loops[i], sources);
  for (std::size_t j = 0; j < family.loops.size(); ++j)
    if (j != i) out = out - family.loops[j].interior();
  return out;
}

std::vector<Segment> family_segments(const Region& region, const LoopFamily& family, const SourceSet& sources) {
  std::vector<Segment> out = segments(exterior(region, family, sources), family.root);
  for (std::size_t i = 0; i < family.loops.size(); ++i) {
    for (Segment& s : segments(padding(family, i, sources), family.loops[i].index())) out.push_back(std::move(s));
  }
  return out;
}

std::vector<Contour> contours(const LoopFamily& family, int ell0, const Region& region, const SourceSet& sources) {
  const std::size_t n = family.loops.size();
  std::vector<std::vector<Edge>> mb(n);
  for (std::size_t i = 0; i < n; ++i) mb[i] = boundary(mantle(family.loops[i]));

  std::vector<int> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  auto unite = [&](int i, int j) { root[find(i)] = find(j); };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<Edge> common;
      std::set_intersection(mb[i].begin(), mb[i].end(), mb[j].begin(), mb[j].end(), std::back_inserter(common));
      if (!common.empty()) unite(static_cast<int>(i), static_cast<int>(j));
    }
  }

  std::vector<std::pair<Segment, int>> linked;  // short segment and one loop it touches
  for (const Segment& s : family_segments(region, family, sources)) {
    if (static_cast<long>(s.size()) >= ell0) continue;
    int first = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const bool touches = std::binary_search(mb[i].begin(), mb[i].end(), s.lower_outer_edge()) ||
                           std::binary_search(mb[i].begin(), mb[i].end(), s.upper_outer_edge());
      if (!touches) continue;
      if (first < 0) {
        first = static_cast<int>(i);
      } else {
        unite(first, static_cast<int>(i));
      }
    }
    if (first >= 0) linked.emplace_back(s, first);
  }

  std::map<int, Contour> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(static_cast<int>(i))].loop_ids.push_back(static_cast<int>(i));
  for (auto& [s, i] : linked) groups[find(i)].short_segments.push_back(std::move(s));
  std::vector<Contour> out;
  for (auto& [r, c] : groups) out.push_back(std::move(c));
  return out;
}

std::vector<Contour> external_contours(const LoopFamily& family, const std::vector<Contour>& all) {
  std::vector<Contour> out;
  for (std::size_t a = 0; a < all.size(); ++a) {
    bool inner = false;
    for (std::size_t b = 0; b < all.size() && !inner; ++b) {
      if (a == b) continue;
      for (int i : all[a].loop_ids) {
        for (int j : all[b].loop_ids) {
          if (family.loops[i].interior().is_subset_of(family.loops[j].interior())) inner = true;
        }
      }
    }
    if (!inner) out.push_back(all[a]);
  }
  return out;
}

// ---------------------------------------------------------------------------

double log_factorized_weight(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                             const LoopFamily& family) {
  double total = log_oriented_Z(exterior(region, family), p, bc);
  for (std::size_t i = 0; i < family.loops.size(); ++i) {
    const Loop& l = family.loops[i];
    const auto mag = boundary(core(l), l.index());
    const BoundaryCondition inner{l.index(), EdgeSet(mag.begin(), mag.end()), bc.ell0};
    total += log_mantle_weight(l, p) + log_oriented_Z(padding(family, i), p, inner);
  }
  return total;
}

FactorizationReport verify_loop_factorization(const Region& region, const ModelParams& p,
                                              const BoundaryCondition& bc, const EnumerationOptions& options) {
  p.validate();
  if (!bc.magnetized.empty()) {
    throw ValidationError("decomposition", "loop factorization check requires an unmagnetized boundary");
  }
  struct Fiber {
    LoopFamily family;
    LogAccumulator sum;
    std::size_t count = 0;
  };
  std::map<std::vector<Loop>, Fiber> fibers;
  FactorizationReport report;
  for_each_configuration(
      region, bc, {},
      [&](const DimerConfiguration& config) {
        LoopFamily f = build_loop_family(config, bc.q);
        auto [it, fresh] = fibers.try_emplace(f.key());
        if (fresh) it->second.family = std::move(f);
        it->second.sum.add(log_weight(config, p, bc));
        ++it->second.count;
        ++report.configurations;
      },
      options);

  for (auto& [key, fiber] : fibers) {
    FamilyCheck c;
    c.family = fiber.family;
    c.configurations = fiber.count;
    c.log_grouped = fiber.sum.value();
    c.log_product = log_factorized_weight(region, p, bc, fiber.family);
    c.rel_discrepancy = std::abs(std::expm1(c.log_grouped - c.log_product));
    report.max_rel_discrepancy = std::max(report.max_rel_discrepancy, c.rel_discrepancy);
    report.families.push_back(std::move(c));
  }
  return report;
}

}  // namespace nematic
