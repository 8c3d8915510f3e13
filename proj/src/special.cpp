#include "nbound/special.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "nbound/errors.hpp"

namespace nb {

double bessel_j(double nu, double x) {
  if (nu < 0.0) throw InvalidInput("bessel_j: order must be non-negative");
  if (x < 0.0) throw InvalidInput("bessel_j: argument must be non-negative");
  if (x > 12.0) throw InvalidInput("bessel_j: series evaluation limited to x <= 12");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  const double q = -half * half;
  double term = std::pow(half, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double ball_neumann_frequency(int n) {
  if (n != 2 && n != 3) throw InvalidInput("ball_neumann_frequency: only n = 2 and n = 3 supported");
  const double nu = 0.5 * n;
  // (t^{1-nu} J_nu)' = t^{-nu} (t J_{nu-1} - (2nu - 1) J_nu); the prefactor has no zeros.
  const auto f = [nu](double t) { return t * bessel_j(nu - 1.0, t) - (2.0 * nu - 1.0) * bessel_j(nu, t); };
  // f > 0 near the origin; scan for the first sign change.
  const double step = 0.05;
  double lo = step;
  double flo = f(lo);
  for (double hi = lo + step; hi < 10.0; hi += step) {
    const double fhi = f(hi);
    if ((flo > 0.0) != (fhi > 0.0)) {
      std::uintmax_t iters = 200;
      const auto tol = boost::math::tools::eps_tolerance<double>(52);
      const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
      return 0.5 * (a + b);
    }
    lo = hi;
    flo = fhi;
  }
  throw ConvergenceError("ball_neumann_frequency: no sign change found", 0.0);
}

}  // namespace nb
