#pragma once

#include <optional>
#include <vector>

#include "nematic/gibbs.hpp"
#include "nematic/lattice.hpp"

namespace nematic {

/// Sites covered by c-dimers.
Region support_of(const DimerConfiguration& config, Orientation c);

/// Filled hulls of the 4-connected clusters of `support`, keeping only those
/// not contained in another hull. The loops are their boundaries.
std::vector<Region> outer_loops(const Region& support);

/// A loop l = ∂l̄ with its interior l̄ and index c(l).
class Loop {
 public:
  /// Throws ValidationError unless the interior is non-empty, 4-connected and
  /// simply connected.
  Loop(Region interior, Orientation index);

  const Region& interior() const { return interior_; }
  Orientation index() const { return index_; }
  std::vector<Edge> edges() const { return boundary(interior_); }
  std::size_t length() const { return edges().size(); }

  friend bool operator==(const Loop&, const Loop&) = default;
  friend auto operator<=>(const Loop& l, const Loop& r) {
    if (auto c = l.interior_ <=> r.interior_; c != 0) return c;
    return l.index_ <=> r.index_;
  }

 private:
  Region interior_;
  Orientation index_;
};

/// Interior sites, minus sources, at c-distance ≥ 2 from the c-edges of the
/// loop and (−c)-distance ≥ 1 from its (−c)-edges.
Region core(const Region& interior, Orientation c, const SourceSet& sources = {});
inline Region core(const Loop& l, const SourceSet& sources = {}) { return core(l.interior(), l.index(), sources); }

/// Interior minus the source-free core.
Region mantle(const Region& interior, Orientation c);
inline Region mantle(const Loop& l) { return mantle(l.interior(), l.index()); }

/// The close-packed c-dimer tiling of the mantle, if one exists. The c-edge
/// graph of the mantle is a union of paths, so a tiling exists iff every
/// c-segment has even length, and is then unique.
std::optional<DimerConfiguration> mantle_tiling(const Region& interior, Orientation c);

/// Mantle disjoint from the sources and tileable by c-dimers.
bool is_bounding(const Region& interior, Orientation c, const SourceSet& sources = {});

/// log 𝔜: weight of the mantle tiling evaluated directly (dimers, aligned
/// pairs, contacts with sources). Throws StructuralError if untileable.
double log_mantle_weight(const Loop& l, const ModelParams& p, const SourceSet& sources = {});
/// Same quantity from (ze^J)^{|𝕆|/2} e^{−J|∂_c𝕆|/2} times the source contacts.
double log_mantle_weight_closed_form(const Loop& l, const ModelParams& p, const SourceSet& sources = {});

/// 𝓛_q(δ) with its inclusion tree. parent[i] is the index of the smallest
/// loop containing loop i, or −1 for the root ∂Λ.
struct LoopFamily {
  Orientation root = Orientation::v;
  std::vector<Loop> loops;
  std::vector<int> parent;

  bool empty() const { return loops.empty(); }
  /// Loops sorted; equal families have equal keys.
  std::vector<Loop> key() const;
  /// Children of a c-loop are (−c)-loops and top-level loops have index −root.
  bool is_alternating() const;
  /// Loops pairwise edge-disjoint with pairwise disjoint mantles.
  bool is_disjoint() const;
};

/// Parent links computed from the geometry alone (smallest strictly
/// containing interior).
std::vector<int> inclusion_parents(const std::vector<Loop>& loops);

/// Recursive loop construction. Throws StructuralError if an extracted loop
/// is not bounding for its index.
LoopFamily build_loop_family(const DimerConfiguration& config, Orientation q, const SourceSet& sources = {});

/// Λ^{(Υ)} \ ∪l̄ for the loops of a family.
Region exterior(const Region& region, const LoopFamily& family, const SourceSet& sources = {});
/// Padding ι(l): core of loop i minus every other loop interior.
Region padding(const LoopFamily& family, std::size_t i, const SourceSet& sources = {});

struct Contour {
  std::vector<int> loop_ids;          // indices into the family
  std::vector<Segment> short_segments;  // segments of length < ℓ₀ linking them
};

/// All segments 𝒮 between the loops of a family.
std::vector<Segment> family_segments(const Region& region, const LoopFamily& family, const SourceSet& sources = {});

/// Groups loops into contours: loops connect when their mantle boundaries
/// share an edge, or through a segment of length < ℓ₀ whose outer c-edge lies
/// on the mantle boundary of both.
std::vector<Contour> contours(const LoopFamily& family, int ell0, const Region& region,
                              const SourceSet& sources = {});

/// Drops every contour having a loop inside a loop of another contour.
std::vector<Contour> external_contours(const LoopFamily& family, const std::vector<Contour>& all);

struct FamilyCheck {
  LoopFamily family;
  std::size_t configurations = 0;
  double log_grouped = 0.0;   // log Σ weight over the fiber
  double log_product = 0.0;   // log of the factorized right-hand side
  double rel_discrepancy = 0.0;
};

struct FactorizationReport {
  std::size_t configurations = 0;
  std::vector<FamilyCheck> families;
  double max_rel_discrepancy = 0.0;
};

/// Right-hand side of the loop factorization for one family: q-oriented
/// model outside the loops, mantle weights, and c(l)-oriented models on the
/// paddings with magnetized ∂_{c(l)} core.
double log_factorized_weight(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                             const LoopFamily& family);

/// Groups all admissible configurations by loop family and compares each
/// fiber's total weight with the factorized form. Requires ϱ = ∅.
FactorizationReport verify_loop_factorization(const Region& region, const ModelParams& p,
                                              const BoundaryCondition& bc, const EnumerationOptions& options = {});

}  // namespace nematic
