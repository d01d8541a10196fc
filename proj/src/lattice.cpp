#include "nematic/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>

#include "nematic/error.hpp"

namespace nematic {

std::string_view to_string(Orientation c) { return c == Orientation::h ? "h" : "v"; }

Orientation parse_orientation(std::string_view s) {
  if (s == "h") return Orientation::h;
  if (s == "v") return Orientation::v;
  throw ValidationError("lattice", "orientation must be \"h\" or \"v\", got \"" + std::string(s) + "\"");
}

Edge::Edge(Site a, Site b) {
  if (std::abs(a.x - b.x) + std::abs(a.y - b.y) != 1) {
    throw ValidationError("lattice", "edge endpoints (" + std::to_string(a.x) + "," + std::to_string(a.y) +
                                         ") and (" + std::to_string(b.x) + "," + std::to_string(b.y) +
                                         ") are not nearest neighbours");
  }
  a_ = std::min(a, b);
  b_ = std::max(a, b);
}

long Distance::value() const {
  if (infinite_) throw std::logic_error("lattice: value() of an infinite distance");
  return value_;
}

Distance q_distance(Site p, Site r, Orientation c) {
  if (c == Orientation::v) {
    if (p.x != r.x) return Distance::infinity();
    return Distance(std::abs(p.y - r.y));
  }
  if (p.y != r.y) return Distance::infinity();
  return Distance(std::abs(p.x - r.x));
}

Distance q_distance(std::span<const Site> p, std::span<const Site> r, Orientation c) {
  Distance best = Distance::infinity();
  for (Site s : p)
    for (Site t : r) best = std::min(best, q_distance(s, t, c));
  return best;
}

Distance q_distance(const Edge& d, const Edge& e, Orientation c) {
  const Site ds[] = {d.a(), d.b()};
  const Site es[] = {e.a(), e.b()};
  return q_distance(ds, es, c);
}

// ---------------------------------------------------------------------------

Region::Region(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

Region Region::rectangle(int w, int h, Site origin) {
  if (w < 0 || h < 0) throw ValidationError("lattice", "rectangle dimensions must be non-negative");
  std::vector<Site> s;
  s.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y) s.push_back({origin.x + x, origin.y + y});
  return Region(std::move(s));
}

bool Region::contains(Site p) const { return std::binary_search(sites_.begin(), sites_.end(), p); }

std::vector<Edge> Region::edges() const {
  std::vector<Edge> out;
  for (Site p : sites_) {
    for (Orientation c : {Orientation::h, Orientation::v}) {
      if (contains(p + unit(c))) out.push_back(Edge::along(p, c));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> Region::boundary() const {
  std::vector<Edge> out;
  static constexpr Site steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (Site p : sites_) {
    for (Site s : steps) {
      if (!contains(p + s)) out.emplace_back(p, p + s);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Region Region::translated(Site t) const {
  std::vector<Site> s(sites_);
  for (Site& p : s) p = p + t;
  return Region(std::move(s));
}

Region Region::transposed() const {
  std::vector<Site> s(sites_);
  for (Site& p : s) p = {p.y, p.x};
  return Region(std::move(s));
}

Region operator|(const Region& l, const Region& r) {
  std::vector<Site> out;
  std::set_union(l.sites_.begin(), l.sites_.end(), r.sites_.begin(), r.sites_.end(), std::back_inserter(out));
  return Region(std::move(out));
}

Region operator&(const Region& l, const Region& r) {
  std::vector<Site> out;
  std::set_intersection(l.sites_.begin(), l.sites_.end(), r.sites_.begin(), r.sites_.end(),
                        std::back_inserter(out));
  return Region(std::move(out));
}

Region operator-(const Region& l, const Region& r) {
  std::vector<Site> out;
  std::set_difference(l.sites_.begin(), l.sites_.end(), r.sites_.begin(), r.sites_.end(), std::back_inserter(out));
  return Region(std::move(out));
}

bool Region::is_subset_of(const Region& other) const {
  return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(), sites_.end());
}

bool Region::intersects(const Region& other) const {
  auto i = sites_.begin();
  auto j = other.sites_.begin();
  while (i != sites_.end() && j != other.sites_.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

std::vector<Edge> boundary(const Region& region) { return region.boundary(); }

std::vector<Edge> boundary(const Region& region, Orientation c) {
  std::vector<Edge> out;
  for (const Edge& e : region.boundary())
    if (e.orientation() == c) out.push_back(e);
  return out;
}

std::vector<Segment> segments(const Region& region, Orientation c) {
  // Sort by (line coordinate, position along the line) and split into runs.
  auto line_of = [c](Site p) { return c == Orientation::v ? p.x : p.y; };
  auto pos_of = [c](Site p) { return c == Orientation::v ? p.y : p.x; };
  std::vector<Site> s(region.begin(), region.end());
  std::sort(s.begin(), s.end(), [&](Site l, Site r) {
    return std::pair(line_of(l), pos_of(l)) < std::pair(line_of(r), pos_of(r));
  });
  std::vector<Segment> out;
  for (Site p : s) {
    if (!out.empty()) {
      Segment& cur = out.back();
      Site q = cur.last();
      if (line_of(q) == line_of(p) && pos_of(q) + 1 == pos_of(p)) {
        cur.sites.push_back(p);
        continue;
      }
    }
    out.push_back(Segment{c, {p}});
  }
  return out;
}

std::vector<Region> connected_components(const Region& region) {
  static constexpr Site steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::set<Site> unseen(region.begin(), region.end());
  std::vector<Region> out;
  while (!unseen.empty()) {
    std::vector<Site> comp;
    std::deque<Site> queue{*unseen.begin()};
    unseen.erase(unseen.begin());
    while (!queue.empty()) {
      Site p = queue.front();
      queue.pop_front();
      comp.push_back(p);
      for (Site s : steps) {
        auto it = unseen.find(p + s);
        if (it != unseen.end()) {
          queue.push_back(*it);
          unseen.erase(it);
        }
      }
    }
    out.emplace_back(std::move(comp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Sites of the bounding box (grown by one) not reachable from outside the region.
std::vector<Site> enclosed_sites(const Region& region) {
  if (region.empty()) return {};
  int x0 = region.begin()->x, x1 = x0, y0 = region.begin()->y, y1 = y0;
  for (Site p : region) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  --x0, --y0, ++x1, ++y1;
  const int w = x1 - x0 + 1, h = y1 - y0 + 1;
  auto idx = [&](Site p) { return static_cast<std::size_t>(p.x - x0) * h + (p.y - y0); };
  std::vector<char> reached(static_cast<std::size_t>(w) * h, 0);
  static constexpr Site steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  std::deque<Site> queue{{x0, y0}};
  reached[idx({x0, y0})] = 1;
  while (!queue.empty()) {
    Site p = queue.front();
    queue.pop_front();
    for (Site s : steps) {
      Site n = p + s;
      if (n.x < x0 || n.x > x1 || n.y < y0 || n.y > y1) continue;
      if (reached[idx(n)] || region.contains(n)) continue;
      reached[idx(n)] = 1;
      queue.push_back(n);
    }
  }
  std::vector<Site> out;
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y)
      if (!reached[idx({x, y})] && !region.contains({x, y})) out.push_back({x, y});
  return out;
}

}  // namespace

Region fill_holes(const Region& region) { return region | Region(enclosed_sites(region)); }

bool is_simply_connected(const Region& region) { return enclosed_sites(region).empty(); }

}  // namespace nematic
