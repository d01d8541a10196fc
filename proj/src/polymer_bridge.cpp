#include "nematic/polymer_bridge.hpp"

#include <algorithm>
#include <cmath>

#include "nematic/error.hpp"

namespace nematic {

namespace {

bool loops_compatible(const Loop& l, const Loop& m) {
  if (l.interior().intersects(m.interior())) return false;
  const auto le = l.edges(), me = m.edges();
  std::vector<Edge> shared;
  std::set_intersection(le.begin(), le.end(), me.begin(), me.end(), std::back_inserter(shared));
  return shared.empty();
}

}  // namespace

BridgeReport dimer_polymer_bridge(const Region& region, const ModelParams& p, const BoundaryCondition& bc, int order,
                                  const EnumerationOptions& options) {
  if (region.size() > 16) throw SizeCapError("polymer_cluster", "polymer bridge limited to 16 sites");
  const FactorizationReport fr = verify_loop_factorization(region, p, bc, options);
  const double log_ref = log_oriented_Z(region, p, bc);

  BridgeReport rep;
  std::vector<double> zeta;
  // the empty family reproduces the oriented model, so only the others enter
  double rest = 0.0;
  for (const FamilyCheck& f : fr.families) {
    if (f.family.empty()) continue;
    const double ratio = std::exp(f.log_grouped - log_ref);
    rest += ratio;
    if (f.family.loops.size() == 1) {
      rep.polymers.push_back(f.family.loops.front());
      zeta.push_back(ratio);
    }
  }
  rep.log_direct = std::log1p(rest);

  std::vector<std::pair<int, int>> clashes;
  for (std::size_t i = 0; i < rep.polymers.size(); ++i)
    for (std::size_t j = i + 1; j < rep.polymers.size(); ++j)
      if (!loops_compatible(rep.polymers[i], rep.polymers[j]))
        clashes.emplace_back(static_cast<int>(i), static_cast<int>(j));
  rep.system = PolymerSystem(std::move(zeta), clashes);
  rep.log_polymer = exact_log_partition(rep.system);
  if (order > 0) rep.log_truncated = truncated_log_partition(rep.system, order);
  rep.discrepancy = std::abs(rep.log_polymer - rep.log_direct);
  return rep;
}

}  // namespace nematic
