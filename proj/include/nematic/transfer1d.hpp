#pragma once

#include <array>
#include <cmath>

#include <Eigen/Core>

namespace nematic {

/// Dimer activity z > 0 and alignment coupling J.
struct ModelParams {
  double z = 1.0;
  double J = 0.0;

  /// Throws ValidationError unless z > 0 and both values are finite.
  void validate() const;

  /// ε = 1/√(z e^J), evaluated without forming e^J.
  double epsilon() const { return std::exp(-0.5 * (std::log(z) + J)); }
  /// κ = e^{−J} ε
  double kappa() const { return std::exp(-J) * epsilon(); }
  /// Correlation length e^{3J/2}√z of the oriented chain.
  double correlation_length() const { return std::exp(1.5 * J) * std::sqrt(z); }
};

/// Coordinates of the single-site state space, in the order used by the
/// transfer matrix: half-dimer pointing right, half-dimer pointing left, monomer.
enum class SiteState { right = 0, left = 1, monomer = 2 };

/// Element of the three-dimensional boundary space, stored as
/// exp(log_scale) · components so that magnetized vectors survive J ≫ 700.
class BoundaryVector {
 public:
  BoundaryVector() = default;
  BoundaryVector(double right, double left, double monomer, double log_scale = 0.0)
      : components_(right, left, monomer), log_scale_(log_scale) {}

  /// |→⟩ + |×⟩
  static BoundaryVector open() { return {1.0, 0.0, 1.0}; }
  /// e^J |→⟩ + |×⟩
  static BoundaryVector magnetized(const ModelParams& p) { return {1.0, 0.0, std::exp(-p.J), p.J}; }
  static BoundaryVector basis(SiteState s);

  const Eigen::Vector3d& components() const { return components_; }
  double log_scale() const { return log_scale_; }
  /// Plain coordinates; overflows for very large scales.
  Eigen::Vector3d dense() const { return std::exp(log_scale_) * components_; }

 private:
  Eigen::Vector3d components_ = Eigen::Vector3d::Zero();
  double log_scale_ = 0.0;
};

/// Left and right boundary vectors of a chain.
struct BoundaryPair {
  BoundaryVector left;
  BoundaryVector right;
};

/// Transfer matrix in the (right, left, monomer) basis.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> transfer_matrix(const ModelParams& p) {
  using std::exp;
  Eigen::Matrix<Scalar, 3, 3> t;
  const Scalar z(p.z);
  const Scalar eJ = exp(Scalar(p.J));
  t << Scalar(0), z, Scalar(0),
       eJ, Scalar(0), Scalar(1),
       Scalar(1), Scalar(0), Scalar(1);
  return t;
}

/// The right boundary vector is read "from the other end": its right/left
/// coordinates are swapped before contraction, so that
/// Ψ(ℓ) = ω_left · T^{ℓ−1} · R ω_right.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> end_reflection() {
  Eigen::Matrix<Scalar, 3, 3> r;
  r << Scalar(0), Scalar(1), Scalar(0),
       Scalar(1), Scalar(0), Scalar(0),
       Scalar(0), Scalar(0), Scalar(1);
  return r;
}

enum class Branch { plus = 0, minus = 1, zero = 2 };

/// Spectral data of the transfer matrix.
///
/// λ₊ is the largest root of λ³ − λ² − z e^J λ + z e^J − z, λ₋ the most
/// negative and λ₀ the remaining one.  The roots are obtained from the
/// rescaled cubic in μ = λ ε, which keeps every coefficient O(1) however
/// large z e^J is.  Roots are kept in extended precision: for odd chain
/// lengths with magnetized ends the spectral sum cancels by a factor ~e^J.
class TransferSolution {
 public:
  const ModelParams& params() const { return params_; }

  double lambda(Branch i) const { return static_cast<double>(lambda_[idx(i)]); }
  long double lambda_ext(Branch i) const { return lambda_[idx(i)]; }
  double lambda_plus() const { return lambda(Branch::plus); }
  double lambda_minus() const { return lambda(Branch::minus); }
  double lambda_zero() const { return lambda(Branch::zero); }

  /// b_i = z / ((2λ_i(λ_i − 1)² + z) λ_i); infinite when λ_i = 0 (J = 0).
  double b(Branch i) const;

  /// b_i λ_i^ℓ, finite for every ℓ ≥ 1 including λ_i = 0.
  double amplitude(Branch i, int ell) const;
  /// log|b_i λ_i^ℓ| and its sign.
  double log_abs_amplitude(Branch i, int ell) const;
  int amplitude_sign(Branch i, int ell) const;

  /// Rescaled root μ_i = ε λ_i.
  double scaled_lambda(Branch i) const { return static_cast<double>(mu_[idx(i)]); }

 private:
  friend TransferSolution solve(const ModelParams& p);
  static constexpr std::size_t idx(Branch i) { return static_cast<std::size_t>(i); }

  ModelParams params_;
  std::array<long double, 3> mu_{};
  std::array<long double, 3> lambda_{};
  double log_inv_eps_ = 0.0;  // log √(z e^J)
};

/// Diagonalizes the transfer matrix.  Throws DegeneracyError when two roots
/// coincide within solver tolerance or the spectrum is not real.
TransferSolution solve(const ModelParams& p);

/// ν_i(ω), linear in ω with ν_i(→) = λ_i − 1, ν_i(←) = λ_i(λ_i − 1)/z, ν_i(×) = 1.
double nu(const TransferSolution& sol, Branch i, const BoundaryVector& omega);

/// Partition function of the oriented chain of `ell` sites.
double psi(const TransferSolution& sol, int ell, const BoundaryVector& left, const BoundaryVector& right);
double log_psi(const TransferSolution& sol, int ell, const BoundaryVector& left, const BoundaryVector& right);

/// e^{−W_ω(ℓ)} = 1 + Σ_{i∈{−,0}} (ν_i ν_i b_i / ν₊ ν₊ b₊)(λ_i/λ₊)^ℓ
double interaction_weight(const TransferSolution& sol, int ell, const BoundaryPair& omega);

/// Direct sum over chain configurations (no transfer matrix).  ell ≤ 20.
double psi_bruteforce(const ModelParams& p, int ell, const BoundaryVector& left, const BoundaryVector& right);

}  // namespace nematic
