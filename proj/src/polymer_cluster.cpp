#include "nematic/polymer_cluster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "nematic/error.hpp"

namespace nematic {

namespace {

constexpr int kMaxClusterSize = 8;
constexpr std::size_t kMaxExactPolymers = 25;

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw SizeCapError("polymer_cluster", "rational overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw SizeCapError("polymer_cluster", "rational overflow");
  return r;
}

// Σ over connected graphs on the cluster elements of Π (Φ − 1). With
// g(S) = 1 iff S is pairwise compatible (the all-graph sum), the connected
// sum follows from c(S) = g(S) − Σ_{T ∋ min S, T ⊊ S} c(T) g(S \ T).
std::int64_t connected_sum(const Cluster& cl, const PolymerSystem& sys) {
  const int n = static_cast<int>(cl.size());
  const unsigned full = (1u << n) - 1;
  std::vector<char> g(full + 1, 1);
  for (unsigned s = 1; s <= full; ++s) {
    const int lo = std::countr_zero(s);
    const unsigned rest = s & (s - 1);
    if (!g[rest]) {
      g[s] = 0;
      continue;
    }
    for (unsigned t = rest; t; t &= t - 1) {
      const int j = std::countr_zero(t);
      if (!sys.compatible(cl[lo], cl[j])) {
        g[s] = 0;
        break;
      }
    }
  }
  std::vector<std::int64_t> c(full + 1, 0);
  for (unsigned s = 1; s <= full; ++s) {
    const unsigned low = s & (~s + 1);
    const unsigned rest = s ^ low;
    std::int64_t v = g[s];
    // proper subsets T of s containing the lowest element: T = low | sub, sub ⊊ rest
    for (unsigned sub = (rest - 1) & rest;; sub = (sub - 1) & rest) {
      if (sub != rest) {
        const unsigned t = low | sub;
        if (g[s ^ t]) v -= c[t];
      }
      if (sub == 0) break;
    }
    if (rest == 0) v = 1;
    c[s] = v;
  }
  return c[full];
}

std::int64_t multiplicity_factorials(Cluster cl) {
  std::sort(cl.begin(), cl.end());
  std::int64_t f = 1;
  for (std::size_t i = 0; i < cl.size();) {
    std::size_t j = i;
    while (j < cl.size() && cl[j] == cl[i]) ++j;
    for (std::size_t k = 2; k <= j - i; ++k) f *= static_cast<std::int64_t>(k);
    i = j;
  }
  return f;
}

void check_cluster(const Cluster& cl, const PolymerSystem& sys) {
  if (cl.size() > static_cast<std::size_t>(kMaxClusterSize)) {
    throw SizeCapError("polymer_cluster", "Ursell coefficient limited to clusters of size <= 8");
  }
  for (int i : cl) {
    if (i < 0 || static_cast<std::size_t>(i) >= sys.size()) {
      throw ValidationError("polymer_cluster", "cluster refers to an unknown polymer");
    }
  }
}

bool incompatibility_connected(const Cluster& cl, const PolymerSystem& sys) {
  const std::size_t n = cl.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && !sys.compatible(cl[i], cl[j])) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

// Visits nondecreasing index sequences of length 1..max_len that extend
// `cl` with indices ≥ start, calling visit(cluster) for each.
template <class Visit>
void for_each_multiset(std::size_t n, int max_len, Cluster& cl, int start, Visit&& visit) {
  if (static_cast<int>(cl.size()) == max_len) return;
  for (int i = start; i < static_cast<int>(n); ++i) {
    cl.push_back(i);
    visit(cl);
    for_each_multiset(n, max_len, cl, i, visit);
    cl.pop_back();
  }
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError("polymer_cluster", "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational operator+(const Rational& l, const Rational& r) {
  const std::int64_t g = std::gcd(l.den_, r.den_);
  return {checked_add(checked_mul(l.num_, r.den_ / g), checked_mul(r.num_, l.den_ / g)),
          checked_mul(l.den_ / g, r.den_)};
}
Rational operator-(const Rational& l, const Rational& r) { return l + Rational(-r.num_, r.den_); }
Rational operator*(const Rational& l, const Rational& r) {
  const std::int64_t g1 = std::gcd(l.num_, r.den_), g2 = std::gcd(r.num_, l.den_);
  return {checked_mul(l.num_ / g1, r.num_ / g2), checked_mul(l.den_ / g2, r.den_ / g1)};
}
Rational operator/(const Rational& l, const Rational& r) {
  if (r.num_ == 0) throw ValidationError("polymer_cluster", "division by zero");
  return l * Rational(r.den_, r.num_);
}

std::string to_string(const Rational& r) {
  return r.den() == 1 ? std::to_string(r.num()) : std::to_string(r.num()) + "/" + std::to_string(r.den());
}

PolymerSystem::PolymerSystem(std::vector<double> zeta, const std::vector<std::pair<int, int>>& incompatible_pairs,
                             std::vector<double> a, std::vector<double> d, double delta)
    : zeta_(std::move(zeta)), a_(std::move(a)), d_(std::move(d)), delta_(delta) {
  const std::size_t n = zeta_.size();
  if (a_.empty()) a_.assign(n, 0.0);
  if (d_.empty()) d_.assign(n, 0.0);
  if (a_.size() != n || d_.size() != n) throw ValidationError("polymer_cluster", "a and d must have one entry per polymer");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(zeta_[i])) throw ValidationError("polymer_cluster", "activities must be finite");
    if (!(a_[i] >= 0.0) || !(d_[i] >= 0.0)) throw ValidationError("polymer_cluster", "a and d must be non-negative");
  }
  if (!(delta_ >= 0.0 && delta_ < 1.0)) throw ValidationError("polymer_cluster", "delta must lie in [0, 1)");
  incompatible_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) incompatible_[i * n + i] = 1;
  for (auto [i, j] : incompatible_pairs) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
      throw ValidationError("polymer_cluster", "incompatible pair refers to an unknown polymer");
    }
    incompatible_[i * n + j] = incompatible_[j * n + i] = 1;
  }
}

std::vector<std::pair<int, int>> PolymerSystem::incompatible_pairs() const {
  std::vector<std::pair<int, int>> out;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (incompatible_[i * n + j]) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return out;
}

Rational ursell_exact(const Cluster& cluster, const PolymerSystem& sys) {
  check_cluster(cluster, sys);
  if (cluster.empty()) return Rational(0);
  return Rational(connected_sum(cluster, sys), multiplicity_factorials(cluster));
}

double ursell(const Cluster& cluster, const PolymerSystem& sys) { return ursell_exact(cluster, sys).to_double(); }

double exact_log_partition(const PolymerSystem& sys) {
  const std::size_t n = sys.size();
  if (n > kMaxExactPolymers) throw SizeCapError("polymer_cluster", "exact partition limited to 25 polymers");
  // incompatibility masks, then a DFS over independent subsets
  std::vector<std::uint32_t> clash(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !sys.compatible(i, j)) clash[i] |= 1u << j;
  double total = 0.0;
  auto rec = [&](auto&& self, std::size_t i, std::uint32_t chosen, double w) -> void {
    if (i == n) {
      total += w;
      return;
    }
    self(self, i + 1, chosen, w);
    if (!(clash[i] & chosen) && sys.zeta(i) != 0.0) self(self, i + 1, chosen | (1u << i), w * sys.zeta(i));
  };
  rec(rec, 0, 0u, 1.0);
  if (!(total > 0.0)) throw ValidationError("polymer_cluster", "partition sum is not positive");
  return std::log(total);
}

double truncated_log_partition(const PolymerSystem& sys, int max_order, std::uint64_t max_clusters) {
  if (max_order < 0) throw ValidationError("polymer_cluster", "max_order must be non-negative");
  if (max_order > kMaxClusterSize) throw SizeCapError("polymer_cluster", "max_order limited to 8");
  std::uint64_t visited = 0;
  double sum = 0.0;
  Cluster cl;
  for_each_multiset(sys.size(), max_order, cl, 0, [&](const Cluster& c) {
    if (++visited > max_clusters) throw SizeCapError("polymer_cluster", "too many clusters for the requested order");
    if (!incompatibility_connected(c, sys)) return;
    double w = 1.0;
    for (int i : c) w *= sys.zeta(i);
    if (w == 0.0) return;
    sum += ursell(c, sys) * w;
  });
  return sum;
}

ConvergenceReport check_convergence(const PolymerSystem& sys) {
  ConvergenceReport rep;
  const double delta = sys.delta();
  // δ/|log(1−δ)| → 1 as δ → 0
  const double ratio = delta == 0.0 ? 1.0 : delta / std::abs(std::log1p(-delta));
  const std::size_t n = sys.size();
  auto weight = [&](std::size_t i) { return std::abs(sys.zeta(i)) * std::exp(sys.a(i) + sys.d(i)); };
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weight(i);
    if (!(w <= delta)) rep.violations.push_back({i, 1, w, delta});
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (!sys.compatible(i, j)) s += weight(j);
    const double rhs = ratio * sys.a(i);
    if (!(s <= rhs)) rep.violations.push_back({i, 2, s, rhs});
  }
  rep.holds = rep.violations.empty();
  return rep;
}

RemainderReport remainder_bound_check(const PolymerSystem& sys, std::size_t pinned, int max_order) {
  if (pinned >= sys.size()) throw ValidationError("polymer_cluster", "pinned polymer out of range");
  if (max_order < 1) throw ValidationError("polymer_cluster", "max_order must be at least 1");
  if (max_order > kMaxClusterSize) throw SizeCapError("polymer_cluster", "max_order limited to 8");
  RemainderReport rep;
  rep.bound = std::exp(sys.a(pinned));
  rep.convergent = check_convergence(sys).holds;
  rep.sum = 1.0;  // γ̄ = ∅
  Cluster rest;
  for_each_multiset(sys.size(), max_order - 1, rest, 0, [&](const Cluster& c) {
    Cluster full = c;
    full.push_back(static_cast<int>(pinned));
    if (!incompatibility_connected(full, sys)) return;
    double w = 1.0;
    for (int i : c) w *= std::abs(sys.zeta(i)) * std::exp(sys.d(i));
    if (w == 0.0) return;
    rep.sum += std::abs(ursell(full, sys)) * w;
  });
  return rep;
}

}  // namespace nematic
