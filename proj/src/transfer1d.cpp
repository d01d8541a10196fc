#include "nematic/transfer1d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "nematic/error.hpp"

namespace nematic {

void ModelParams::validate() const {
  if (!std::isfinite(z) || !(z > 0.0)) throw ValidationError("transfer1d", "dimer activity z must be finite and > 0");
  if (!std::isfinite(J)) throw ValidationError("transfer1d", "coupling J must be finite");
}

BoundaryVector BoundaryVector::basis(SiteState s) {
  switch (s) {
    case SiteState::right: return {1.0, 0.0, 0.0};
    case SiteState::left: return {0.0, 1.0, 0.0};
    case SiteState::monomer: return {0.0, 0.0, 1.0};
  }
  return {};
}

namespace {

using real = long double;

constexpr real kLogMax = 11000.0L;

// log|2λ(λ−1)² + z| and its sign, without overflow for huge λ.
std::pair<real, int> log_abs_denominator(real lambda, real z) {
  if (lambda == 0.0L) return {std::log(z), 1};
  const real log_u = std::log(2.0L) + std::log(std::abs(lambda)) + 2.0L * std::log(std::abs(lambda - 1.0L));
  const int sign_u = lambda > 0.0L ? 1 : -1;
  if (log_u < kLogMax) {
    const real d = 2.0L * lambda * (lambda - 1.0L) * (lambda - 1.0L) + z;
    return {std::log(std::abs(d)), d > 0.0L ? 1 : (d < 0.0L ? -1 : 0)};
  }
  const real ratio = sign_u * std::exp(std::log(z) - log_u);  // z / u
  return {log_u + std::log1p(ratio), sign_u};
}

// ν_i(ω) without the exp(log_scale) factor.
real nu_unscaled(real lambda, real z, const Eigen::Vector3d& c) {
  real v = 0.0L;
  if (c[0] != 0.0) v += c[0] * (lambda - 1.0L);
  if (c[1] != 0.0) v += c[1] * (lambda / z) * (lambda - 1.0L);
  if (c[2] != 0.0) v += c[2];
  return v;
}

// Roots of μ³ + aμ² + bμ + c, all assumed real; polished by Newton.
std::array<real, 3> real_cubic_roots(real a, real b, real c) {
  const real p = b - a * a / 3.0L;
  const real q = 2.0L * a * a * a / 27.0L - a * b / 3.0L + c;
  if (!(p < 0.0L)) throw DegeneracyError("transfer1d", "transfer matrix spectrum is not three distinct real roots");
  const real m = 2.0L * std::sqrt(-p / 3.0L);
  real arg = (3.0L * q / (2.0L * p)) * std::sqrt(-3.0L / p);
  if (std::abs(arg) > 1.0L + 1e-12L) {
    throw DegeneracyError("transfer1d", "transfer matrix has complex eigenvalues");
  }
  arg = std::clamp(arg, -1.0L, 1.0L);
  const real theta = std::acos(arg) / 3.0L;
  std::array<real, 3> r{};
  for (int k = 0; k < 3; ++k) r[k] = m * std::cos(theta - 2.0L * std::numbers::pi_v<real> * k / 3.0L) - a / 3.0L;
  for (real& x : r) {
    for (int it = 0; it < 6; ++it) {
      const real f = ((x + a) * x + b) * x + c;
      const real df = (3.0L * x + 2.0L * a) * x + b;
      if (df == 0.0L) break;
      const real step = f / df;
      x -= step;
      if (std::abs(step) <= 1e-20L * std::abs(x)) break;
    }
  }
  return r;
}

real log_abs_amp(real l, real z, int ell) {
  const real pow_part =
      ell == 1 ? 0.0L : (l == 0.0L ? -std::numeric_limits<real>::infinity() : (ell - 1) * std::log(std::abs(l)));
  return std::log(z) + pow_part - log_abs_denominator(l, z).first;
}

int amp_sign(real l, real z, int ell) {
  if (ell > 1 && l == 0.0L) return 0;
  const int sign_pow = (l < 0.0L && (ell - 1) % 2 == 1) ? -1 : 1;
  return log_abs_denominator(l, z).second * sign_pow;
}

}  // namespace

TransferSolution solve(const ModelParams& p) {
  p.validate();
  TransferSolution sol;
  sol.params_ = p;
  sol.log_inv_eps_ = 0.5 * (std::log(p.z) + p.J);
  const real t = std::exp(-0.5L * (std::log(static_cast<real>(p.z)) + p.J));  // ε
  const real g = -std::expm1(-static_cast<real>(p.J));                        // 1 − e^{−J}
  // μ = ελ solves μ³ − εμ² − μ + ε(1 − e^{−J}) = 0.
  auto r = real_cubic_roots(-t, -1.0L, t * g);
  std::sort(r.begin(), r.end());
  const real scale = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
  if (r[1] - r[0] <= 1e-10L * scale || r[2] - r[1] <= 1e-10L * scale) {
    throw DegeneracyError("transfer1d", "two transfer-matrix eigenvalues coincide");
  }
  sol.mu_ = {r[2], r[0], r[1]};
  for (std::size_t i = 0; i < 3; ++i) sol.lambda_[i] = sol.mu_[i] / t;
  return sol;
}

double TransferSolution::b(Branch i) const {
  const real l = lambda_ext(i);
  if (l == 0.0L) return std::numeric_limits<double>::infinity();
  const real z = params_.z;
  return static_cast<double>(z / ((2.0L * l * (l - 1.0L) * (l - 1.0L) + z) * l));
}

double TransferSolution::log_abs_amplitude(Branch i, int ell) const {
  return static_cast<double>(log_abs_amp(lambda_ext(i), params_.z, ell));
}

int TransferSolution::amplitude_sign(Branch i, int ell) const { return amp_sign(lambda_ext(i), params_.z, ell); }

double TransferSolution::amplitude(Branch i, int ell) const {
  return amplitude_sign(i, ell) * std::exp(log_abs_amplitude(i, ell));
}

double nu(const TransferSolution& sol, Branch i, const BoundaryVector& omega) {
  return std::exp(omega.log_scale()) *
         static_cast<double>(nu_unscaled(sol.lambda_ext(i), sol.params().z, omega.components()));
}

namespace {

struct SpectralTerms {
  std::array<real, 3> nu_prod;      // unscaled ν_i(ω_left) ν_i(ω_right)
  std::array<real, 3> log_abs_amp;  // log|b_i λ_i^ℓ|
  std::array<int, 3> amp_sign;
  double log_scale;
};

SpectralTerms spectral_terms(const TransferSolution& sol, int ell, const BoundaryVector& left,
                             const BoundaryVector& right) {
  SpectralTerms t{};
  const real z = sol.params().z;
  for (Branch i : {Branch::plus, Branch::minus, Branch::zero}) {
    const auto k = static_cast<std::size_t>(i);
    const real l = sol.lambda_ext(i);
    t.nu_prod[k] = nu_unscaled(l, z, left.components()) * nu_unscaled(l, z, right.components());
    t.log_abs_amp[k] = log_abs_amp(l, z, ell);
    t.amp_sign[k] = amp_sign(l, z, ell);
  }
  t.log_scale = left.log_scale() + right.log_scale();
  return t;
}

// Σ_{i∈{−,0}} (ν_i ν_i b_i λ_i^ℓ) / (ν₊ ν₊ b₊ λ₊^ℓ); requires a non-zero leading term.
real subleading_ratio(const SpectralTerms& t) {
  const real lead_nu = t.nu_prod[0];
  const real log_lead = std::log(std::abs(lead_nu)) + t.log_abs_amp[0];
  const int sign_lead = (lead_nu > 0 ? 1 : -1) * t.amp_sign[0];
  real sum = 0.0L;
  for (std::size_t k : {1u, 2u}) {
    const real n = t.nu_prod[k];
    if (n == 0.0L || t.amp_sign[k] == 0) continue;
    const real log_term = std::log(std::abs(n)) + t.log_abs_amp[k];
    const int sign = (n > 0 ? 1 : -1) * t.amp_sign[k] * sign_lead;
    sum += sign * std::exp(log_term - log_lead);
  }
  return sum;
}

void check_ell(int ell) {
  if (ell < 1) throw ValidationError("transfer1d", "chain length must be >= 1");
}

}  // namespace

double interaction_weight(const TransferSolution& sol, int ell, const BoundaryPair& omega) {
  check_ell(ell);
  const SpectralTerms t = spectral_terms(sol, ell, omega.left, omega.right);
  if (t.nu_prod[0] == 0.0L) throw ValidationError("transfer1d", "leading boundary functional vanishes");
  return static_cast<double>(1.0L + subleading_ratio(t));
}

namespace {

bool non_negative(const BoundaryVector& w) { return (w.components().array() >= 0.0).all(); }

real log_add(real a, real b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const real m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Row vector times T, ℓ−1 times, in log space. All terms are non-negative, so
// nothing cancels; used when the spectral sum loses its precision.
real log_psi_recursive(const ModelParams& p, int ell, const BoundaryVector& left, const BoundaryVector& right) {
  const real lz = std::log(static_cast<real>(p.z)), J = p.J, ninf = -INFINITY;
  auto lg = [&](double x) { return x > 0.0 ? std::log(static_cast<real>(x)) : ninf; };
  std::array<real, 3> v{lg(left.components()[0]), lg(left.components()[1]), lg(left.components()[2])};
  for (int i = 1; i < ell; ++i) {
    // T rows: right→left (z); left→right (e^J), left→monomer; monomer→right, monomer→monomer
    const std::array<real, 3> w{log_add(v[1] + J, v[2]), v[0] + lz, log_add(v[1], v[2])};
    v = w;
  }
  const auto& r = right.components();
  real out = log_add(log_add(v[0] + lg(r[1]), v[1] + lg(r[0])), v[2] + lg(r[2]));
  return out + left.log_scale() + right.log_scale();
}

// Relative size of the result against its largest spectral term below which
// the long double sum is no longer trusted.
constexpr real kCancellation = 1e-8L;

real log_psi_ext(const TransferSolution& sol, int ell, const BoundaryVector& left, const BoundaryVector& right) {
  check_ell(ell);
  const SpectralTerms t = spectral_terms(sol, ell, left, right);
  const bool positive = non_negative(left) && non_negative(right);
  if (t.nu_prod[0] != 0.0L && t.amp_sign[0] * t.nu_prod[0] > 0.0L) {
    const real sub = subleading_ratio(t);
    const real ewm = 1.0L + sub;
    if (ewm > kCancellation * std::max(1.0L, std::abs(sub)) || (!positive && ewm > 0.0L)) {
      return t.log_scale + std::log(t.nu_prod[0]) + t.log_abs_amp[0] + std::log(ewm);
    }
  }
  real direct = 0.0L, largest = 0.0L;
  for (std::size_t k = 0; k < 3; ++k) {
    if (t.nu_prod[k] == 0.0L || t.amp_sign[k] == 0) continue;
    const real term = t.nu_prod[k] * t.amp_sign[k] * std::exp(t.log_abs_amp[k]);
    direct += term;
    largest = std::max(largest, std::abs(term));
  }
  if (positive && !(std::isfinite(direct) && direct > kCancellation * largest)) {
    return log_psi_recursive(sol.params(), ell, left, right);
  }
  if (direct < 0.0L) throw ValidationError("transfer1d", "boundary vectors give a negative chain weight");
  return t.log_scale + std::log(direct);
}

}  // namespace

double log_psi(const TransferSolution& sol, int ell, const BoundaryVector& left, const BoundaryVector& right) {
  return static_cast<double>(log_psi_ext(sol, ell, left, right));
}

double psi(const TransferSolution& sol, int ell, const BoundaryVector& left, const BoundaryVector& right) {
  return static_cast<double>(std::exp(log_psi_ext(sol, ell, left, right)));
}

double psi_bruteforce(const ModelParams& p, int ell, const BoundaryVector& left, const BoundaryVector& right) {
  p.validate();
  check_ell(ell);
  if (ell > 20) throw SizeCapError("transfer1d", "psi_bruteforce is limited to chains of at most 20 sites");

  const Eigen::Vector3d wl = left.dense();
  const Eigen::Vector3d wr = right.dense();
  const double eJ = std::exp(p.J);
  // The right end is read from the outside: a half-dimer pointing left at the
  // last site is the |→⟩ coordinate of ω_right.
  auto right_coord = [&](SiteState s) {
    switch (s) {
      case SiteState::right: return wr[1];
      case SiteState::left: return wr[0];
      case SiteState::monomer: return wr[2];
    }
    return 0.0;
  };

  std::vector<SiteState> s(static_cast<std::size_t>(ell));
  double total = 0.0;
  // Every site is R (half-dimer pointing right), L or M. An R followed by an L
  // is a dimer; an L first or an R last is a half-dimer leaving the chain.
  std::function<void(int)> place = [&](int i) {
    if (i == ell) {
      int dimers = 0, pairs = 0;
      for (int k = 0; k + 1 < ell; ++k) {
        if (s[k] == SiteState::right && s[k + 1] == SiteState::left) ++dimers;
        if (s[k] == SiteState::left && s[k + 1] == SiteState::right) ++pairs;
      }
      total += std::pow(p.z, dimers) * std::pow(eJ, pairs) * wl[static_cast<int>(s[0])] * right_coord(s[ell - 1]);
      return;
    }
    const bool after_right = i > 0 && s[i - 1] == SiteState::right;
    for (SiteState st : {SiteState::right, SiteState::left, SiteState::monomer}) {
      if (after_right && st != SiteState::left) continue;
      if (i > 0 && !after_right && st == SiteState::left) continue;
      s[i] = st;
      place(i + 1);
    }
  };
  place(0);
  return total;
}

}  // namespace nematic
