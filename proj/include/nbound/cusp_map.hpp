#pragma once

#include <Eigen/Dense>

#include "nbound/core.hpp"

namespace nb {

/// Which algebraic form of the distortion radicand to use.
///
/// `corrected` is sum((a g_i - 1)^2) + (n - 1) + a^2, the Frobenius bound of the
/// rescaled differential. `paper_simplified` is a^2 (sum g_i^2 + 1) - 2a sum g_i,
/// which is the same expansion without the 2(n - 1) term and can go negative.
enum class DistortionVariant { corrected, paper_simplified };

const char* to_string(DistortionVariant v) noexcept;

/// The power map phi_a : H_1 -> H_g,
///   phi_a(x)_i = (x_i / x_n) x_n^{a gamma_i},  phi_a(x)_n = x_n^a.
class CuspMap {
 public:
  static constexpr double kDefaultMargin = 1e-12;

  /// Throws InvalidInput unless a > 0.
  CuspMap(double a, CuspProfile profile, double margin = kDefaultMargin);

  double a() const noexcept { return a_; }
  const CuspProfile& profile() const noexcept { return profile_; }
  int dimension() const noexcept { return profile_.dimension(); }

  /// Strict membership in H_1 with the configured boundary margin.
  bool in_reference(const Eigen::VectorXd& x) const;
  /// Strict membership in H_g with the configured boundary margin.
  bool in_target(const Eigen::VectorXd& y) const;

  // All evaluations below throw InvalidInput for points not strictly in the domain.
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& y) const;
  double jacobian_det(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian_matrix(const Eigen::VectorXd& x) const;

  /// The differential divided by x_n^{a-1}: entries depend on x only through
  /// u_i = x_i / x_n and x_n^{a(gamma_i - 1)}, all bounded by 1.
  Eigen::MatrixXd rescaled_jacobian(const Eigen::VectorXd& x) const;

  /// x_n^{a-1} sqrt(radicand), an upper bound for the operator norm of D phi_a.
  /// Returns NaN for the simplified variant when its radicand is negative.
  double distortion_bound(const Eigen::VectorXd& x,
                          DistortionVariant variant = DistortionVariant::corrected) const;

 private:
  void require_reference(const Eigen::VectorXd& x) const;

  double a_;
  CuspProfile profile_;
  double margin_;
};

/// Constant part of the distortion bound (independent of x).
double distortion_radicand(double a, const CuspProfile& profile, DistortionVariant variant);

/// Largest singular value via power iteration on M^T M.
double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& m, double rel_tol = 1e-14, int max_iter = 1000);

}  // namespace nb
