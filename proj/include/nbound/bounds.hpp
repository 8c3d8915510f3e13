#pragma once

#include <optional>
#include <string>

#include "nbound/core.hpp"
#include "nbound/cusp_map.hpp"

namespace nb {

// ---------------------------------------------------------------------------
// Classical bounds on the first nontrivial Neumann eigenvalue.

/// pi_p = 2 pi (p-1)^{1/p} / (p sin(pi/p)), p > 1.
double pi_p(double p);

/// (pi_p / d)^p; valid for convex domains of diameter d (convexity not checked).
double ent_lower(double d, double p);

/// pi^2 / d^2; valid for convex domains of diameter d (convexity not checked).
double payne_weinberger_lower(double d);

/// p_{n/2}^2 / R_*^2 with R_* the radius of the ball of the given volume. n in {2, 3}.
double szego_weinberger_upper(int n, double volume);

struct ClassicalBounds {
  int n;
  double p;
  double diameter;
  double volume;
  double ball_radius;
  double pw_lower;
  double ent_lower;
  double sw_upper;
};

ClassicalBounds classical_bounds(int n, double p, double diameter, double volume);

// ---------------------------------------------------------------------------
// Constants of the composite cusp bound.

/// Distortion constant bound K_{p,q}(H_1) for phi_a.
///
/// paper_simplified: a^{-1/p} sqrt(a^2 (sum g^2 + 1) - 2a sum g); nullopt when the
/// radicand is negative.
/// corrected: a^{-1/p} sqrt(radicand + 2(n-1)) times max(1, k_tail_factor), so the
/// value bounds the true integral even where 0 < e < 1 in int_0^1 t^{e-1} dt.
///
/// Requires 1 < q < p. Throws DivergenceError when the defining integral is
/// infinite (a >= p(n-q)/(q(gamma-p)) for p < gamma).
std::optional<double> k_pq_closed(double a, const CuspProfile& profile, double p, double q,
                                  DistortionVariant variant);

/// a^{-1/p} sqrt(radicand) without the tail factor; nullopt on negative radicand.
std::optional<double> k_pq_radical(double a, const CuspProfile& profile, double p,
                                   DistortionVariant variant);

/// (1/e)^{(p-q)/(pq)} where e is the exponent of int_0^1 t^{e-1} dt left after
/// bounding |D phi_a| by its Frobenius form. Throws DivergenceError when e <= 0.
double k_tail_factor(double a, const CuspProfile& profile, double p, double q);

/// Exact M_{r,p}(H_1) = a^{1/p} (1/(beta+1))^{(r-p)/(rp)},
/// beta = (a gamma - n) r/(r-p) + n - 1. Requires r > p; throws DivergenceError
/// when a <= np/(gamma r).
double m_rp_exact(double a, const CuspProfile& profile, double r, double p);

/// The bound M_{r,p} <= a^{1/p}. Only valid when beta >= 0; kept for comparison.
double m_rp_shortcut(double a, double p);

/// Upper bound for the (r,q) Poincare constant of H_1, with omega_n the unit-ball
/// volume. Throws DivergenceError when delta = 1/q - 1/r >= 1/n.
double b_rq_h1(int n, double q, double r);

/// (k m b)^{-p}.
double composite_mu_lower(double k, double m, double b, double p);

enum class BoundStatus { ok, no_admissible_interval, invalid_variant };

const char* to_string(BoundStatus s) noexcept;

struct BoundReport {
  CuspProfile profile;
  ExponentConfig exponents{};
  DistortionVariant variant = DistortionVariant::corrected;
  BoundStatus status = BoundStatus::no_admissible_interval;
  double a_star = 0.0;
  double a_lo = 0.0;  // effective interval for a (after the M-finiteness cut)
  double a_hi = 0.0;
  bool a_on_boundary = false;
  bool extrapolated = false;  // n = 2: formulas evaluated outside the n >= 3 theorem
  double radicand = 0.0;
  double k_pq = 0.0;
  double m_rp = 0.0;
  double m_rp_shortcut = 0.0;  // a^{1/p}, reported for comparison only
  double b_rq = 0.0;
  double mu_lower = 0.0;

  bool ok() const noexcept { return status == BoundStatus::ok; }
};

/// Effective a-interval for given (q, r): I_a cut by a > np/(gamma r).
AInterval effective_a_interval(const CuspProfile& profile, double p, double q, double r);

/// Minimizer of the (upward) radicand parabola over the closure of `iv`.
/// Sets `on_boundary` when the vertex had to be clamped.
double clamped_radicand_vertex(const CuspProfile& profile, const AInterval& iv, bool& on_boundary);

/// Best bound for a fixed exponent triple, optimizing a only.
BoundReport bound_for_exponents(const CuspProfile& profile, const ExponentConfig& exps,
                                DistortionVariant variant);

/// Bound pipeline at a fixed (a, q, r) without any optimization.
BoundReport bound_at(const CuspProfile& profile, const ExponentConfig& exps, double a,
                     DistortionVariant variant);

struct SearchOpts {
  int q_points = 32;
  int r_points = 32;
  int refine_sweeps = 4;
};

/// Optimized cusp bound: grid over (q, r), refinement around the best cell.
BoundReport cusp_mu_lower(const CuspProfile& profile, double p, const SearchOpts& opts = {},
                          DistortionVariant variant = DistortionVariant::corrected);

}  // namespace nb
