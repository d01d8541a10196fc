#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nematic {

/// Exact fraction with 64-bit parts, always reduced, denominator > 0.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& l, const Rational& r);
  friend Rational operator-(const Rational& l, const Rational& r);
  friend Rational operator*(const Rational& l, const Rational& r);
  friend Rational operator/(const Rational& l, const Rational& r);
  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

std::string to_string(const Rational& r);

/// Abstract hard-core polymer system. Polymers are the indices 0..n−1; a
/// polymer is never compatible with itself.
class PolymerSystem {
 public:
  PolymerSystem() = default;
  /// Throws ValidationError on mismatched sizes, out-of-range pairs,
  /// negative a/d or δ outside [0, 1).
  PolymerSystem(std::vector<double> zeta, const std::vector<std::pair<int, int>>& incompatible_pairs,
                std::vector<double> a = {}, std::vector<double> d = {}, double delta = 0.5);

  std::size_t size() const { return zeta_.size(); }
  double zeta(std::size_t i) const { return zeta_[i]; }
  double a(std::size_t i) const { return a_[i]; }
  double d(std::size_t i) const { return d_[i]; }
  double delta() const { return delta_; }
  bool compatible(std::size_t i, std::size_t j) const { return i != j && !incompatible_[i * size() + j]; }
  std::vector<std::pair<int, int>> incompatible_pairs() const;

 private:
  std::vector<double> zeta_, a_, d_;
  std::vector<char> incompatible_;  // n×n, symmetric
  double delta_ = 0.5;
};

/// Multiset of polymers as a list of indices (order irrelevant).
using Cluster = std::vector<int>;

/// Φ^T of a cluster, exactly. Connected graphs are summed by inclusion-
/// exclusion over subsets (3^n); n ≤ 8.
Rational ursell_exact(const Cluster& cluster, const PolymerSystem& sys);
double ursell(const Cluster& cluster, const PolymerSystem& sys);

/// log Σ over pairwise compatible subsets of Π ζ. n ≤ 25; throws
/// ValidationError if the sum is not positive.
double exact_log_partition(const PolymerSystem& sys);

/// Σ over clusters of total multiplicity ≤ max_order (≤ 8) of Φ^T Π ζ.
/// Throws SizeCapError when more than `max_clusters` multisets would be visited.
double truncated_log_partition(const PolymerSystem& sys, int max_order, std::uint64_t max_clusters = 20'000'000);

struct ConvergenceWitness {
  std::size_t polymer;
  int condition;  // 1: |ζ|e^{a+d} ≤ δ, 2: incompatible sum ≤ δ a / |log(1−δ)|
  double lhs;
  double rhs;
};

struct ConvergenceReport {
  bool holds = true;
  std::vector<ConvergenceWitness> violations;  // in polymer order
  std::optional<ConvergenceWitness> first() const {
    return violations.empty() ? std::nullopt : std::optional(violations.front());
  }
};

ConvergenceReport check_convergence(const PolymerSystem& sys);

struct RemainderReport {
  double sum = 0.0;    // truncated Σ |Φ^T({γ}⊔γ̄) Π ζ e^d|
  double bound = 0.0;  // e^{a(γ)}
  bool convergent = false;
  bool within_bound() const { return sum <= bound; }
};

/// Truncated left-hand side of the remainder bound for the pinned polymer,
/// over clusters of total multiplicity ≤ max_order including the pin.
RemainderReport remainder_bound_check(const PolymerSystem& sys, std::size_t pinned, int max_order = 8);

}  // namespace nematic
