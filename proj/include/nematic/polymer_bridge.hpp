#pragma once

#include <optional>
#include <vector>

#include "nematic/decomposition.hpp"
#include "nematic/polymer_cluster.hpp"

namespace nematic {

struct BridgeReport {
  std::vector<Loop> polymers;   // the loop of each single-loop family
  PolymerSystem system;         // ζ = fiber weight / oriented partition function
  double log_direct = 0.0;      // log(Z / oriented Z), summed family by family
  double log_polymer = 0.0;     // exact_log_partition(system)
  std::optional<double> log_truncated;  // truncated expansion, when order > 0
  double discrepancy = 0.0;     // |log_polymer − log_direct|
};

/// Hard-core polymer system of single-loop families on a small region (at
/// most 16 sites, unmagnetized boundary). Two polymers are compatible when
/// their interiors are disjoint and their loops share no edge.
BridgeReport dimer_polymer_bridge(const Region& region, const ModelParams& p, const BoundaryCondition& bc,
                                  int order = 0, const EnumerationOptions& options = {});

}  // namespace nematic
