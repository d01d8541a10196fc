#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nematic/lattice.hpp"
#include "nematic/transfer1d.hpp"

namespace nematic {

/// Boundary condition (q, ϱ, ℓ₀): favored orientation, magnetized boundary
/// edges and the exclusion length for (−q)-dimers.
struct BoundaryCondition {
  Orientation q = Orientation::v;
  EdgeSet magnetized;
  int ell0 = 0;

  /// ϱ must consist of q-edges of ∂region, and ℓ₀ ≥ 0.
  void validate(const Region& region) const;
};

/// Set of pairwise vertex-disjoint edges.
class DimerConfiguration {
 public:
  DimerConfiguration() = default;
  /// Throws ValidationError if two edges share an endpoint.
  explicit DimerConfiguration(EdgeSet dimers);
  DimerConfiguration(std::initializer_list<Edge> dimers) : DimerConfiguration(EdgeSet(dimers)) {}

  const EdgeSet& dimers() const { return dimers_; }
  std::size_t size() const { return dimers_.size(); }
  bool empty() const { return dimers_.empty(); }
  bool contains(const Edge& e) const { return dimers_.count(e) != 0; }
  auto begin() const { return dimers_.begin(); }
  auto end() const { return dimers_.end(); }

  friend bool operator==(const DimerConfiguration&, const DimerConfiguration&) = default;

 private:
  EdgeSet dimers_;
};

/// Edges forced to be occupied (Υ).
using SourceSet = EdgeSet;

/// Throws if two sources share a vertex; returns a warning for every pair
/// closer than ℓ₀ (Euclidean distance between endpoints).
std::vector<std::string> check_sources(const SourceSet& sources, int ell0);

/// Collinear neighbours at distance 1 (same orientation, one lattice step apart).
bool interacts(const Edge& d1, const Edge& d2);

/// Number of unordered interacting pairs A(δ).
int interacting_pairs(const DimerConfiguration& config);

/// Number of (dimer, magnetized edge) contacts: a dimer gains one factor e^J
/// for every collinear ϱ-edge it touches, as if that edge carried a dimer.
int bound_contacts(const DimerConfiguration& config, const BoundaryCondition& bc);

double log_weight(const DimerConfiguration& config, const ModelParams& p, const BoundaryCondition& bc);
double weight(const DimerConfiguration& config, const ModelParams& p, const BoundaryCondition& bc);

/// A (−q)-edge is admissible when both endpoints lie at q-distance ≥ ℓ₀ from
/// every endpoint of a boundary edge; q-edges always are.
bool admissible(const Edge& e, const BoundaryCondition& bc, const Region& region);
bool admissible(const DimerConfiguration& config, const BoundaryCondition& bc, const Region& region);

struct EnumerationOptions {
  /// Restrict to dimers of one orientation (oracle for the oriented model).
  std::optional<Orientation> only;
  int threads = 1;
  std::size_t max_edges = 40;
};

/// counts[n][k] = number of admissible configurations with n dimers and
/// k = A(δ) + bound contacts, so that Z = Σ counts[n][k] zⁿ e^{kJ}.
struct WeightHistogram {
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t configurations() const;
  /// log Z, −∞ when no configuration is allowed.
  double log_evaluate(const ModelParams& p) const;
  /// Z itself; overflows to +∞ where log_evaluate does not.
  double evaluate(const ModelParams& p) const;
};

/// Exhaustive branch-and-bound over ℰ(region). Throws SizeCapError beyond
/// options.max_edges edges and ValidationError for overlapping sources or
/// sources outside the region.
WeightHistogram weight_histogram(const Region& region, const BoundaryCondition& bc, const SourceSet& sources = {},
                                 const EnumerationOptions& options = {});

/// Calls `visit` once per admissible configuration containing the sources.
void for_each_configuration(const Region& region, const BoundaryCondition& bc, const SourceSet& sources,
                            const std::function<void(const DimerConfiguration&)>& visit,
                            const EnumerationOptions& options = {});

double log_enumerate_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                       const SourceSet& sources = {}, const EnumerationOptions& options = {});
double enumerate_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                   const SourceSet& sources = {}, const EnumerationOptions& options = {});

/// ⟨1_{υ₁}⋯1_{υₙ}⟩ = Z(sources = υ) / Z(∅).
double correlation(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                   const SourceSet& upsilon, const EnumerationOptions& options = {});

/// Boundary vectors of one bc.q-segment: magnetized at an end whose outer
/// collinear edge is in ϱ.
BoundaryPair segment_boundary(const Segment& s, const ModelParams& p, const EdgeSet& magnetized);

/// Partition function of the q-oriented model as a product over q-segments.
double log_oriented_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc);
double oriented_Z(const Region& region, const ModelParams& p, const BoundaryCondition& bc);

}  // namespace nematic
