#pragma once

namespace nb {

/// Bessel function of the first kind J_nu(x) for real nu >= 0 and moderate x
/// (power series; accurate to ~1e-14 for 0 <= x <= 12).
double bessel_j(double nu, double x);

/// First positive zero of (t^{1 - n/2} J_{n/2}(t))', the Neumann ground
/// frequency of the unit n-ball. n = 2 gives j'_{1,1}.
double ball_neumann_frequency(int n);

}  // namespace nb
