#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <vector>

namespace nematic {

// ---------------------------------------------------------------------------
// Orientations
// ---------------------------------------------------------------------------

enum class Orientation : std::uint8_t { h, v };

constexpr Orientation opposite(Orientation c) {
  return c == Orientation::h ? Orientation::v : Orientation::h;
}

std::string_view to_string(Orientation c);
Orientation parse_orientation(std::string_view s);

// ---------------------------------------------------------------------------
// Sites and edges
// ---------------------------------------------------------------------------

struct Site {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Site&, const Site&) = default;
  friend constexpr Site operator+(Site p, Site r) { return {p.x + r.x, p.y + r.y}; }
  friend constexpr Site operator-(Site p, Site r) { return {p.x - r.x, p.y - r.y}; }
};

/// Unit step along a line of the given orientation.
constexpr Site unit(Orientation c) {
  return c == Orientation::h ? Site{1, 0} : Site{0, 1};
}

/// Nearest-neighbour pair of sites, stored with the lexicographically smaller
/// endpoint first.
class Edge {
 public:
  /// Throws ValidationError unless ‖a − b‖ = 1.
  Edge(Site a, Site b);

  /// The edge starting at `from` and pointing along `c`.
  static Edge along(Site from, Orientation c) { return Edge(from, from + unit(c)); }

  Site a() const { return a_; }
  Site b() const { return b_; }
  Orientation orientation() const { return a_.x != b_.x ? Orientation::h : Orientation::v; }

  bool touches(Site p) const { return p == a_ || p == b_; }
  bool shares_vertex(const Edge& o) const { return touches(o.a_) || touches(o.b_); }
  Edge translated(Site t) const { return Edge(a_ + t, b_ + t); }

  friend auto operator<=>(const Edge&, const Edge&) = default;

 private:
  Site a_;
  Site b_;
};

using EdgeSet = std::set<Edge>;

// ---------------------------------------------------------------------------
// q-distance
// ---------------------------------------------------------------------------

/// Non-negative integer extended by a distinguished infinity.
class Distance {
 public:
  constexpr explicit Distance(long v) : value_(v) {}
  static constexpr Distance infinity() { return Distance(); }

  constexpr bool is_infinite() const { return infinite_; }
  /// Throws std::logic_error on infinity.
  long value() const;

  friend constexpr bool operator==(const Distance& l, const Distance& r) {
    return l.infinite_ == r.infinite_ && (l.infinite_ || l.value_ == r.value_);
  }
  friend constexpr std::strong_ordering operator<=>(const Distance& l, const Distance& r) {
    if (l.infinite_ || r.infinite_) return l.infinite_ <=> r.infinite_;
    return l.value_ <=> r.value_;
  }

 private:
  constexpr Distance() : value_(0), infinite_(true) {}
  long value_;
  bool infinite_ = false;
};

/// ‖p − r‖ when p and r lie on a common c-line, infinity otherwise.
Distance q_distance(Site p, Site r, Orientation c);

/// Smallest q-distance between the elements of two site sets.
Distance q_distance(std::span<const Site> p, std::span<const Site> r, Orientation c);

/// Smallest q-distance between the endpoints of two edges.
Distance q_distance(const Edge& d, const Edge& e, Orientation c);

// ---------------------------------------------------------------------------
// Regions
// ---------------------------------------------------------------------------

/// A finite set of sites, kept sorted and duplicate-free.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Site> sites);

  /// {origin.x .. origin.x+w−1} × {origin.y .. origin.y+h−1}
  static Region rectangle(int w, int h, Site origin = {});

  bool contains(Site p) const;
  bool empty() const { return sites_.empty(); }
  std::size_t size() const { return sites_.size(); }
  std::span<const Site> sites() const { return sites_; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  /// All edges with both endpoints in the region, sorted.
  std::vector<Edge> edges() const;
  /// Edges with exactly one endpoint in the region, sorted.
  std::vector<Edge> boundary() const;
  bool contains(const Edge& e) const { return contains(e.a()) && contains(e.b()); }

  Region translated(Site t) const;
  /// Reflection across the diagonal x = y.
  Region transposed() const;

  friend Region operator|(const Region& l, const Region& r);
  friend Region operator&(const Region& l, const Region& r);
  friend Region operator-(const Region& l, const Region& r);
  friend bool operator==(const Region&, const Region&) = default;
  friend auto operator<=>(const Region& l, const Region& r) { return l.sites_ <=> r.sites_; }

  bool is_subset_of(const Region& other) const;
  bool intersects(const Region& other) const;

 private:
  std::vector<Site> sites_;
};

std::vector<Edge> boundary(const Region& region);

/// The c-boundary: boundary edges of orientation c.
std::vector<Edge> boundary(const Region& region, Orientation c);

/// Maximal run of consecutive region sites along one c-line.
struct Segment {
  Orientation line;
  std::vector<Site> sites;  // ordered along the line

  std::size_t size() const { return sites.size(); }
  Site first() const { return sites.front(); }
  Site last() const { return sites.back(); }
  /// The c-edge leaving the segment through its lower-left end.
  Edge lower_outer_edge() const { return Edge(first() - unit(line), first()); }
  /// The c-edge leaving the segment through its upper-right end.
  Edge upper_outer_edge() const { return Edge(last(), last() + unit(line)); }

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Splits the region into maximal c-segments.
std::vector<Segment> segments(const Region& region, Orientation c);

/// 4-connected components.
std::vector<Region> connected_components(const Region& region);

/// Region plus every finite 4-connected component of its complement.
Region fill_holes(const Region& region);

/// True iff the complement of the region in Z² is 4-connected.
bool is_simply_connected(const Region& region);

}  // namespace nematic
