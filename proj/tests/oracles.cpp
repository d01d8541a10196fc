#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace oracle {

namespace {

bool same_q_line(Site a, Site b, Orientation q) { return q == Orientation::v ? a.x == b.x : a.y == b.y; }

long q_gap(Site a, Site b, Orientation q) { return q == Orientation::v ? std::labs(a.y - b.y) : std::labs(a.x - b.x); }

bool collinear_neighbours(const Edge& d, const Edge& f) {
  if (d.orientation() != f.orientation()) return false;
  if (d.orientation() == Orientation::h) {
    return d.a().y == f.a().y && (d.b().x + 1 == f.a().x || f.b().x + 1 == d.a().x);
  }
  return d.a().x == f.a().x && (d.b().y + 1 == f.a().y || f.b().y + 1 == d.a().y);
}

// A dimer touching a magnetized boundary edge on its own line.
bool bound_contact(const Edge& d, const Edge& g) { return d.orientation() == g.orientation() && d.shares_vertex(g); }

}  // namespace

bool admissible(const Region& r, const Edge& e, const Model& m) {
  if (e.orientation() == m.q || m.ell0 == 0) return true;
  for (const Edge& b : r.boundary()) {
    for (Site p : {b.a(), b.b()}) {
      for (Site x : {e.a(), e.b()}) {
        if (same_q_line(p, x, m.q) && q_gap(p, x, m.q) < m.ell0) return false;
      }
    }
  }
  return true;
}

double weight(const std::vector<Edge>& config, const Model& m) {
  int k = 0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    for (std::size_t j = i + 1; j < config.size(); ++j) k += collinear_neighbours(config[i], config[j]);
    for (const Edge& g : m.magnetized) k += bound_contact(config[i], g);
  }
  return std::pow(m.z, static_cast<double>(config.size())) * std::exp(m.J * k);
}

void for_each(const Region& r, const Model& m, const std::function<void(const std::vector<Edge>&)>& visit) {
  std::vector<Site> sites(r.begin(), r.end());
  std::set<Site> covered;
  std::vector<Edge> config;
  for (const Edge& s : m.sources) {
    covered.insert(s.a());
    covered.insert(s.b());
    config.push_back(s);
  }
  auto ok = [&](const Edge& e) {
    if (!r.contains(e.a()) || !r.contains(e.b())) return false;
    if (m.only && e.orientation() != *m.only) return false;
    return admissible(r, e, m);
  };
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    while (i < sites.size() && covered.count(sites[i])) ++i;
    if (i == sites.size()) {
      visit(config);
      return;
    }
    const Site s = sites[i];
    covered.insert(s);
    rec(i + 1);
    for (Site t : {Site{s.x + 1, s.y}, Site{s.x, s.y + 1}}) {
      if (!r.contains(t) || covered.count(t)) continue;
      const Edge e(s, t);
      if (!ok(e)) continue;
      covered.insert(t);
      config.push_back(e);
      rec(i + 1);
      config.pop_back();
      covered.erase(t);
    }
    covered.erase(s);
  };
  rec(0);
}

double Z(const Region& r, const Model& m) {
  double total = 0.0;
  for_each(r, m, [&](const std::vector<Edge>& c) { total += weight(c, m); });
  return total;
}

double expectation(const Region& r, const Model& m, const std::vector<Edge>& edges) {
  double num = 0.0, den = 0.0;
  for_each(r, m, [&](const std::vector<Edge>& c) {
    const double w = weight(c, m);
    den += w;
    bool all = true;
    for (const Edge& e : edges) {
      bool found = false;
      for (const Edge& d : c) found = found || d == e;
      all = all && found;
    }
    if (all) num += w;
  });
  return num / den;
}

long double chain_psi(double z, double J, int ell, bool left_mag, bool right_mag) {
  // g[i][a]: weight of sites i..ℓ−1 when a dimer ends at i−1 (a = 1) or not
  const long double zl = z, eJ = std::exp(static_cast<long double>(J));
  std::vector<std::array<long double, 2>> g(ell + 2);
  g[ell] = {1.0L, right_mag ? eJ : 1.0L};
  g[ell + 1] = {0.0L, 0.0L};
  for (int i = ell - 1; i >= 0; --i) {
    for (int a = 0; a < 2; ++a) {
      long double v = g[i + 1][0];
      if (i + 1 < ell) v += zl * (a ? eJ : 1.0L) * g[i + 2][1];
      g[i][a] = v;
    }
  }
  return g[0][left_mag ? 1 : 0];
}

double ursell_by_graphs(const std::vector<int>& cluster, const std::function<bool(int, int)>& compatible) {
  const int n = static_cast<int>(cluster.size());
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  double sum = 0.0;
  const std::uint64_t graphs = 1ULL << slots.size();
  for (std::uint64_t g = 0; g < graphs; ++g) {
    // connectivity by repeated label propagation
    std::vector<int> label(n);
    for (int i = 0; i < n; ++i) label[i] = i;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t k = 0; k < slots.size(); ++k) {
        if (!(g >> k & 1)) continue;
        auto [i, j] = slots[k];
        const int lo = std::min(label[i], label[j]);
        if (label[i] != lo || label[j] != lo) {
          label[i] = label[j] = lo;
          changed = true;
        }
      }
    }
    bool connected = true;
    for (int i = 0; i < n; ++i) connected = connected && label[i] == 0;
    if (!connected) continue;
    double prod = 1.0;
    for (std::size_t k = 0; k < slots.size() && prod != 0.0; ++k) {
      if (!(g >> k & 1)) continue;
      auto [i, j] = slots[k];
      const bool compat = cluster[i] != cluster[j] && compatible(cluster[i], cluster[j]);
      prod *= compat ? 0.0 : -1.0;
    }
    sum += prod;
  }
  // N! = Π over distinct polymers of (multiplicity)!
  double norm = 1.0;
  std::vector<int> sorted = cluster;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    for (std::size_t k = 2; k <= j - i; ++k) norm *= static_cast<double>(k);
    i = j;
  }
  return n == 0 ? 0.0 : sum / norm;
}

double polymer_Z(const std::vector<double>& zeta, const std::function<bool(int, int)>& compatible) {
  const int n = static_cast<int>(zeta.size());
  double total = 0.0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    double w = 1.0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (!(s >> i & 1)) continue;
      w *= zeta[i];
      for (int j = i + 1; j < n && ok; ++j)
        if ((s >> j & 1) && !compatible(i, j)) ok = false;
    }
    if (ok) total += w;
  }
  return total;
}

}  // namespace oracle
