#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "nematic/decomposition.hpp"
#include "nematic/error.hpp"

using namespace nematic;

namespace {

const Orientation V = Orientation::v, H = Orientation::h;

Edge ve(int x, int y) { return Edge::along(Site{x, y}, V); }
Edge he(int x, int y) { return Edge::along(Site{x, y}, H); }

Region domino(Site s, Orientation c) { return Region({s, s + unit(c)}); }

// Close-packed h-dimers on a w×h block except where `skip` says.
EdgeSet h_rows(int w, int h, Site origin, const std::vector<Site>& holes = {}) {
  EdgeSet out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x + 1 < w;) {
      Site s = origin + Site{x, y};
      if (std::find(holes.begin(), holes.end(), s) != holes.end() ||
          std::find(holes.begin(), holes.end(), s + Site{1, 0}) != holes.end()) {
        ++x;
        continue;
      }
      out.insert(Edge::along(s, H));
      x += 2;
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("decomposition") {

TEST_CASE("support") {
  CHECK(support_of(DimerConfiguration{ve(0, 0), ve(3, 1)}, H).empty());
  CHECK(support_of(DimerConfiguration{he(2, 2)}, H) == domino({2, 2}, H));
  CHECK(support_of(DimerConfiguration{ve(0, 0), ve(0, 2)}, V) == Region::rectangle(1, 4));
}

TEST_CASE("outer loops") {
  auto one = outer_loops(domino({0, 0}, H));
  REQUIRE(one.size() == 1);
  CHECK(boundary(one[0]).size() == 6);
  CHECK(outer_loops(Region()).empty());
  auto two = outer_loops(domino({0, 0}, H) | domino({10, 10}, H));
  REQUIRE(two.size() == 2);
  for (const auto& r : two) CHECK(boundary(r).size() == 6);
  // a ring's hole is filled and inner clusters are dropped
  auto ring = Region::rectangle(5, 5) - Region::rectangle(3, 3, {1, 1});
  auto nested = outer_loops(ring | Region({Site{2, 2}}));
  REQUIRE(nested.size() == 1);
  CHECK(nested[0] == Region::rectangle(5, 5));
}

TEST_CASE("loops need simply connected interiors") {
  CHECK_THROWS_AS(Loop(Region(), H), ValidationError);
  CHECK_THROWS_AS(Loop(Region({Site{0, 0}, Site{2, 0}}), H), ValidationError);
  CHECK_THROWS_AS(Loop(Region::rectangle(3, 3) - Region({Site{1, 1}}), H), ValidationError);
}

TEST_CASE("core and mantle of a domino loop") {
  Loop l(domino({0, 0}, H), H);
  CHECK(l.length() == 6);
  CHECK(core(l).empty());
  CHECK(mantle(l) == l.interior());
  CHECK(is_bounding(l.interior(), H));
  CHECK_FALSE(is_bounding(l.interior(), V));
  CHECK_FALSE(is_bounding(l.interior(), H, {he(0, 0)}));
}

TEST_CASE("smallest loop that can hold an aligned dimer has 18 edges") {
  Loop l(Region::rectangle(6, 3), H);
  CHECK(l.length() == 18);
  CHECK(core(l) == Region({Site{2, 1}, Site{3, 1}}));
  CHECK(is_bounding(l.interior(), H));
  // no smaller rectangle has an aligned pair in its core
  for (int w = 1; w <= 6; ++w) {
    for (int h = 1; h <= 6; ++h) {
      if (2 * (w + h) >= 18) continue;
      bool pair = false;
      Region c = core(Region::rectangle(w, h), H);
      for (Site s : c) pair = pair || c.contains(s + unit(H));
      CHECK_FALSE(pair);
    }
  }
}

TEST_CASE("core sites respect both distances") {
  for (auto [w, h] : {std::pair{7, 5}, {9, 4}, {4, 9}}) {
    auto r = Region::rectangle(w, h);
    for (Orientation c : {H, V}) {
      Region k = core(r, c);
      for (Site s : r) {
        const int along = c == H ? std::min(s.x, w - 1 - s.x) : std::min(s.y, h - 1 - s.y);
        const int across = c == H ? std::min(s.y, h - 1 - s.y) : std::min(s.x, w - 1 - s.x);
        // distances to the endpoints of the outer edges
        CHECK(k.contains(s) == (along >= 2 && across >= 1));
      }
    }
  }
}

TEST_CASE("mantle tiling is unique when every segment is even") {
  auto t = mantle_tiling(Region::rectangle(6, 3), H);
  REQUIRE(t.has_value());
  CHECK(t->size() == 8);
  CHECK_FALSE(mantle_tiling(Region::rectangle(5, 1), H).has_value());
}

TEST_CASE("mantle weight") {
  ModelParams p{2.0, 1.3};
  Loop d(domino({0, 0}, H), H);
  CHECK(std::exp(log_mantle_weight(d, p)) == doctest::Approx(p.z));
  CHECK(log_mantle_weight_closed_form(d, p) == doctest::Approx(log_mantle_weight(d, p)));
  for (auto [w, h] : {std::pair{6, 3}, {6, 4}, {8, 5}, {10, 3}}) {
    Loop l(Region::rectangle(w, h), H);
    if (!is_bounding(l.interior(), H)) continue;
    // direct count: dimers and aligned pairs of the tiling
    auto t = *mantle_tiling(l.interior(), H);
    const double direct = t.size() * std::log(p.z) + interacting_pairs(t) * p.J;
    CHECK(log_mantle_weight(l, p) == doctest::Approx(direct));
    CHECK(log_mantle_weight_closed_form(l, p) == doctest::Approx(direct));
  }
  CHECK_THROWS_AS(log_mantle_weight(Loop(domino({0, 0}, H), V), p), StructuralError);
}

TEST_CASE("families") {
  CHECK(build_loop_family(DimerConfiguration{ve(0, 0), ve(1, 2)}, V).empty());

  auto one = build_loop_family(DimerConfiguration{ve(0, 0), he(3, 3), ve(6, 0)}, V);
  REQUIRE(one.loops.size() == 1);
  CHECK(one.loops[0].index() == H);
  CHECK(one.loops[0].length() == 6);
  CHECK(one.parent == std::vector<int>{-1});

  // h-block with a vertical dimer in its core
  EdgeSet cfg = h_rows(6, 4, {0, 0}, {{2, 1}, {2, 2}, {3, 1}, {3, 2}});
  cfg.insert(ve(2, 1));
  auto nested = build_loop_family(DimerConfiguration(cfg), V);
  REQUIRE(nested.loops.size() == 2);
  CHECK(nested.is_alternating());
  CHECK(nested.is_disjoint());
  CHECK(nested.parent == inclusion_parents(nested.loops));
  int inner = nested.loops[0].index() == V ? 0 : 1;
  CHECK(nested.loops[inner].interior() == domino({2, 1}, V));
  CHECK(nested.parent[inner] == 1 - inner);
}

TEST_CASE("family invariants over every configuration of small boxes") {
  for (auto [w, h, ell0] : {std::tuple{4, 4, 1}, {3, 5, 1}, {4, 4, 2}}) {
    auto r = Region::rectangle(w, h);
    BoundaryCondition bc;
    bc.ell0 = ell0;
    std::size_t seen = 0;
    for_each_configuration(r, bc, {}, [&](const DimerConfiguration& c) {
      auto f = build_loop_family(c, V);
      ++seen;
      CHECK(f.is_alternating());
      CHECK(f.is_disjoint());
      CHECK(f.parent == inclusion_parents(f.loops));
      // every non-q dimer lies in some loop interior
      for (const Edge& e : c) {
        if (e.orientation() == V) continue;
        bool inside = false;
        for (const Loop& l : f.loops) inside = inside || l.interior().contains(e);
        CHECK(inside);
      }
    });
    CHECK(seen > 0);
  }
}

TEST_CASE("a step-shaped horizontal cluster gives a non-bounding hull") {
  EdgeSet cfg;
  for (auto [x, y] : std::vector<std::pair<int, int>>{{0, 2}, {0, 3}, {1, 0}, {2, 1}, {2, 2}, {2, 3}, {3, 0},
                                                      {4, 1}, {4, 3}, {6, 0}, {6, 1}, {6, 2}, {6, 3}})
    cfg.insert(he(x, y));
  CHECK_THROWS_AS(build_loop_family(DimerConfiguration(cfg), V), StructuralError);
}

TEST_CASE("contours join loops through short segments") {
  // two h-dominoes in one column pair, two free sites apart
  EdgeSet cfg{he(2, 2), he(2, 5)};
  auto r = Region::rectangle(6, 9);
  auto f = build_loop_family(DimerConfiguration(cfg), V);
  REQUIRE(f.loops.size() == 2);
  CHECK(contours(f, 4, r).size() == 1);
  CHECK(contours(f, 2, r).size() == 2);
  auto far = build_loop_family(DimerConfiguration(EdgeSet{he(0, 0)}), V);
  auto single = contours(far, 3, Region::rectangle(5, 5));
  REQUIRE(single.size() == 1);
  CHECK(single[0].loop_ids == std::vector<int>{0});
}

TEST_CASE("external contours drop contours nested in another") {
  LoopFamily f;
  f.root = V;
  f.loops = {Loop(Region::rectangle(8, 6), H), Loop(Region::rectangle(2, 1, {9, 0}), H),
             Loop(Region::rectangle(1, 2, {3, 2}), V)};
  f.parent = {-1, -1, 0};
  std::vector<Contour> all{{{0, 1}, {}}, {{2}, {}}};
  auto ext = external_contours(f, all);
  REQUIRE(ext.size() == 1);
  CHECK(ext[0].loop_ids == std::vector<int>{0, 1});
  std::vector<Contour> apart{{{0}, {}}, {{1}, {}}};
  CHECK(external_contours(f, apart).size() == 2);
  CHECK(external_contours(f, {}).empty());
}

TEST_CASE("loop factorization on small boxes") {
  for (auto [w, h] : {std::pair{4, 4}, {3, 5}, {5, 3}}) {
    for (int ell0 : {1, 2}) {
      ModelParams p{2.0, 1.0};
      BoundaryCondition bc;
      bc.ell0 = ell0;
      auto rep = verify_loop_factorization(Region::rectangle(w, h), p, bc);
      CHECK(rep.max_rel_discrepancy < 1e-9);
      std::size_t total = 0;
      for (const auto& f : rep.families) {
        total += f.configurations;
        if (f.family.empty()) CHECK(f.log_grouped == doctest::Approx(log_oriented_Z(Region::rectangle(w, h), p, bc)));
      }
      CHECK(total == rep.configurations);
    }
  }
}

TEST_CASE("single domino family factorizes as z times the rest") {
  auto r = Region::rectangle(4, 4);
  ModelParams p{1.5, 0.8};
  BoundaryCondition bc;
  bc.ell0 = 1;
  auto rep = verify_loop_factorization(r, p, bc);
  bool found = false;
  for (const auto& f : rep.families) {
    if (f.family.loops.size() != 1 || f.family.loops[0].length() != 6) continue;
    found = true;
    const auto& l = f.family.loops[0];
    const double expect = std::log(p.z) + log_oriented_Z(r - l.interior(), p, bc);
    CHECK(f.log_grouped == doctest::Approx(expect));
  }
  CHECK(found);
}

TEST_CASE("fiber of a loop with a non-empty padding") {
  // 6×3 box, q = v, ℓ₀ = 0: the whole box as one h-loop with a 2-site core
  auto r = Region::rectangle(6, 3);
  ModelParams p{1.7, 0.6};
  BoundaryCondition bc;
  const Loop big(r, H);
  double fiber = 0.0;
  std::size_t members = 0;
  LoopFamily family;
  for_each_configuration(r, bc, {}, [&](const DimerConfiguration& c) {
    try {
      auto f = build_loop_family(c, V);
      if (f.loops != std::vector<Loop>{big}) return;
      family = f;
      fiber += weight(c, p, bc);
      ++members;
    } catch (const StructuralError&) {
    }
  });
  REQUIRE(members == 2);
  CHECK_FALSE(padding(family, 0).empty());
  CHECK(std::log(fiber) == doctest::Approx(log_factorized_weight(r, p, bc, family)).epsilon(1e-12));
}

TEST_CASE("factorization refuses magnetized boundaries") {
  BoundaryCondition bc;
  bc.magnetized = {Edge(Site{0, -1}, Site{0, 0})};
  CHECK_THROWS_AS(verify_loop_factorization(Region::rectangle(2, 2), {1, 1}, bc), ValidationError);
}

}
