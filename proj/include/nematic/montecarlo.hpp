#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nematic/gibbs.hpp"

namespace nematic {

/// xoshiro256** seeded through splitmix64.
class Rng {
 public:
  using result_type = std::uint64_t;
  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

  /// Uniform in [0, n) by multiply-high.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  static constexpr const char* name() { return "xoshiro256**/splitmix64"; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

struct SamplerConfig {
  Region region;
  ModelParams params;
  BoundaryCondition bc;
  SourceSet sources;  // edges held occupied
  std::uint64_t seed = 1;
  std::int64_t sweeps = 100000;
  std::int64_t thermalization = 10000;
  std::int64_t bin_size = 1000;

  /// sweeps > 0, thermalization ≥ 0, bin_size divides sweeps with at least
  /// 16 bins, admissible non-overlapping sources inside the region.
  void validate() const;
  std::int64_t bins() const { return sweeps / bin_size; }
};

struct ObservableEstimate {
  double mean = 0.0;
  double error = 0.0;  // standard error
  std::int64_t bins = 0;
};

/// Single-edge insert/delete Metropolis chain. A sweep is |ℰ(Λ)| proposals.
class Sampler {
 public:
  explicit Sampler(const SamplerConfig& cfg);

  /// One proposal on a uniformly chosen edge; returns whether it was accepted.
  bool step();
  void sweep();

  /// Proposal on a given edge index (exposed for tests).
  bool propose(std::size_t edge);
  /// log of weight(after)/weight(before) for toggling the edge, from local
  /// data; NaN when the toggle is forbidden.
  double log_ratio(std::size_t edge) const;

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t index_of(const Edge& e) const;
  bool occupied(std::size_t edge) const { return occupied_[edge] != 0; }
  bool is_source(std::size_t edge) const { return source_[edge] != 0; }
  /// Index of the dimer covering a site of the region, −1 if it is a monomer.
  int covering(Site s) const;
  DimerConfiguration state() const;
  /// Replaces the state (tests). Throws unless admissible and containing the sources.
  void set_state(const DimerConfiguration& config);

  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  std::vector<Edge> edges_;
  std::vector<std::array<int, 2>> ends_;      // site indices of the endpoints
  std::vector<std::array<int, 2>> partners_;  // collinear neighbour edges, −1 if none
  std::vector<int> contacts_;                 // magnetized edges collinear with the edge
  std::vector<char> allowed_;                 // admissible and not a source
  std::vector<char> source_;
  std::vector<char> occupied_;
  std::vector<int> owner_;  // per site: covering edge or −1
  std::vector<Site> sites_;
  std::array<double, 5> insert_ratio_{};  // z e^{kJ}
  std::array<double, 5> delete_ratio_{};
  double log_z_ = 0.0, J_ = 0.0;
  Rng rng_;
  std::uint64_t proposals_ = 0, accepted_ = 0;
};

/// Exact conditional expectations of c-dimer indicators on one c-line given
/// every dimer off that line. The free sites of the line split into runs that
/// are independent oriented chains: their ends are open at sites covered by
/// other dimers and magnetized at ϱ-edges and at sources on the line.
class LineConditional {
 public:
  /// Throws ValidationError when c = −q and ℓ₀ > 0 (the line is then not a
  /// plain oriented chain).
  LineConditional(const SamplerConfig& cfg, Orientation c);

  double occupation(const Sampler& s, const Edge& e) const;
  /// E[1_e 1_e2 | off-line dimers]; edges on distinct parallel lines are
  /// conditionally independent.
  double joint(const Sampler& s, const Edge& e, const Edge& e2) const;

 private:
  struct Run {
    std::vector<Site> sites;
    bool left_mag = false, right_mag = false;
  };
  Run run_through(const Sampler& s, const Edge& e) const;
  double log_part(int len, bool left_mag, bool right_mag) const;

  Region region_;
  Orientation c_;
  ModelParams p_;
  EdgeSet magnetized_;
  std::vector<std::array<double, 4>> log_psi_;  // [len][2·left_mag + right_mag]
};

enum class Estimator { indicator, conditional };

/// Per-bin means of the tracked edges and edge products of one chain. With
/// the conditional estimator the per-sweep values are LineConditional
/// expectations instead of indicators.
struct ChainData {
  Estimator estimator = Estimator::indicator;
  std::vector<Edge> edges;
  std::vector<std::pair<Edge, Edge>> pairs;
  std::vector<std::vector<double>> edge_bins;  // [edge][bin]
  std::vector<std::vector<double>> pair_bins;  // [pair][bin] of 1_e 1_e'
  double acceptance = 0.0;
  std::uint64_t seed = 0;
};

ChainData run_chain(const SamplerConfig& cfg, const std::vector<Edge>& edges,
                    const std::vector<std::pair<Edge, Edge>>& pairs = {}, Estimator estimator = Estimator::indicator);

/// Runs one chain per seed (seeds cfg.seed, cfg.seed+1, …) on up to `threads` workers.
std::vector<ChainData> run_chains(const SamplerConfig& cfg, int chains, const std::vector<Edge>& edges,
                                  const std::vector<std::pair<Edge, Edge>>& pairs = {}, int threads = 1,
                                  Estimator estimator = Estimator::indicator);

/// Binning estimate of Σ_i c_i ⟨1_{edge i}⟩ over the tracked edges.
ObservableEstimate linear_estimate(const ChainData& d, const std::vector<double>& coeffs);
ObservableEstimate occupation_estimate(const ChainData& d, std::size_t edge);
/// Jackknife over bins of ⟨1_e 1_e'⟩ − ⟨1_e⟩⟨1_e'⟩ for a tracked pair whose
/// edges are also tracked.
ObservableEstimate connected_estimate(const ChainData& d, std::size_t pair);
/// Jackknife of an arbitrary smooth function of the bin means
/// (edge means first, then pair means).
ObservableEstimate jackknife_estimate(const ChainData& d, const std::function<double(const std::vector<double>&)>& f);

/// Inverse-variance merge; plain average if any input has zero error.
ObservableEstimate merge(const std::vector<ObservableEstimate>& parts);

ObservableEstimate estimate_occupation(const SamplerConfig& cfg, const Edge& e);
ObservableEstimate estimate_pair(const SamplerConfig& cfg, const Edge& e, const Edge& e2);

/// The two c-edges at a site. Half the sum of their occupations is the
/// central-site observable ⟨1_c⟩.
std::vector<Edge> site_edges(Site s, Orientation c);

struct ScanRow {
  int L;
  double z, J;
  ObservableEstimate v, h;  // central site averages
  double ratio;             // h.mean / v.mean
  double deviation;         // |v.mean − 1/2|
  double epsilon;           // 1/√(z e^J)
};

struct ScanOptions {
  int ell0 = 0;
  Orientation q = Orientation::v;
  std::uint64_t seed = 1;
  std::int64_t sweeps = 100000;
  std::int64_t thermalization = 10000;
  std::int64_t bin_size = 1000;
  int chains = 1;
  int threads = 1;
};

std::vector<ScanRow> nematic_scan(const std::vector<int>& sizes, const std::vector<ModelParams>& grid,
                                  const ScanOptions& options);

}  // namespace nematic
