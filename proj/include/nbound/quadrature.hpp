#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "nbound/cusp_map.hpp"

namespace nb {

struct QuadSpec {
  int nodes_1d = 16;  // Gauss-Legendre order per cell and per cross-section direction
  int levels = 40;    // dyadic cells toward the singular end
  int max_levels = 1000;  // refinement continues past `levels` up to this count
  double tol = 1e-8;  // relative change allowed when dropping the finest cell

  void validate() const;
};

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order (Newton iteration on P_n).
GaussRule gauss_legendre(int order);

/// int_0^b f(t) dt on dyadic cells [b 2^{-k-1}, b 2^{-k}], k < levels, plus a
/// power-law model of the remaining [0, b 2^{-levels}] assuming f ~ C t^power.
double graded_integral_1d(const std::function<double(double)>& f, double b, int levels, int nodes,
                          double power);

/// Conical point of the integrand at height t where u_d = 0 for d in dims.
/// Near it the integrand varies on the u-scale u_rate |x_n - t|.
struct Kink {
  double t = 0.0;
  double u_rate = 1.0;
  std::vector<int> dims;
};

/// int_{H_1} f(x) dx via x_i = u_i x_n with dyadic grading in x_n toward 0.
/// `log_f` returns log f(x) (or -inf for zero); `power` is the exponent of the
/// leading t^power behaviour of t^{n-1} times the u-averaged integrand.
/// Cells are added past spec.levels while dropping the finest one changes the value
/// by more than tol; PrecisionError when that still holds at spec.max_levels.
/// Cells near a kink are graded geometrically toward it in t and in the kink's u_d.
double integrate_h1(int n, const std::function<double(const Eigen::VectorXd&)>& log_f,
                    double power, const QuadSpec& spec, const std::vector<Kink>& kinks = {});

/// Kinks of |D phi_a| on H_1: s_i = t^{a(gamma_i - 1)} meets a at u_i = 0.
std::vector<Kink> distortion_kinks(const CuspMap& m);

/// K_{p,q}(phi_a; H_1) = (int (|D phi|^p / J)^{q/(p-q)} dx)^{(p-q)/(pq)}, with
/// |D phi| the operator norm. Throws DivergenceError outside (p + a gamma - pa) q < np.
double k_pq_numeric(const CuspMap& m, double p, double q, const QuadSpec& spec = {});

/// M_{r,p}(H_1) = (int J^{r/(r-p)} dx)^{(r-p)/(rp)}. Throws DivergenceError when
/// a <= np/(gamma r).
double m_rp_numeric(const CuspMap& m, double r, double p, const QuadSpec& spec = {});

/// int_{H_1} J(x, phi_a) dx, which equals the volume 1/gamma of H_g.
double jacobian_volume_numeric(const CuspMap& m, const QuadSpec& spec = {});

/// pi_p from its integral definition with both endpoint behaviours regularized.
double pi_p_integral(double p, const QuadSpec& spec = {});

}  // namespace nb
