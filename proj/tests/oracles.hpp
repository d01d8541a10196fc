#pragma once

// Independent reference implementations used only by the tests. None of
// them call into the library beyond its value types.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "nematic/lattice.hpp"

namespace oracle {

using nematic::Edge;
using nematic::Orientation;
using nematic::Region;
using nematic::Site;

struct Model {
  double z = 1.0;
  double J = 0.0;
  Orientation q = Orientation::v;
  int ell0 = 0;
  std::set<Edge> magnetized;
  std::set<Edge> sources;
  std::optional<Orientation> only;  // restrict to one orientation
};

/// Admissibility read directly off the definition: for a (−q)-edge, the
/// smallest q-distance from its endpoints to the endpoints of any boundary
/// edge must be at least ℓ₀.
bool admissible(const Region& r, const Edge& e, const Model& m);

/// z^n e^{J(pairs + contacts)} by pairwise scans; a contact is a dimer
/// sharing a vertex with a collinear magnetized edge.
double weight(const std::vector<Edge>& config, const Model& m);

/// Visits every admissible configuration containing the sources, built site
/// by site (each site is a monomer or pairs with its right or upper neighbour).
void for_each(const Region& r, const Model& m, const std::function<void(const std::vector<Edge>&)>& visit);

double Z(const Region& r, const Model& m);
/// ⟨Π 1_e⟩ over the given edges.
double expectation(const Region& r, const Model& m, const std::vector<Edge>& edges);

/// Chain partition function by a site-by-site recursion in long double. A
/// magnetized end gives e^J to a dimer on the end site.
long double chain_psi(double z, double J, int ell, bool left_mag, bool right_mag);

/// Φ^T by listing every graph on n ≤ 6 vertices.
double ursell_by_graphs(const std::vector<int>& cluster, const std::function<bool(int, int)>& compatible);

/// Σ over independent subsets of Π ζ by bitmask scan.
double polymer_Z(const std::vector<double>& zeta, const std::function<bool(int, int)>& compatible);

}  // namespace oracle
