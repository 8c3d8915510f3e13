#include <cmath>
#include <random>

#include "doctest.h"
#include "nbound/bounds.hpp"
#include "nbound/errors.hpp"
#include "nbound/quadrature.hpp"

using namespace nb;
using doctest::Approx;

TEST_CASE("Gauss-Legendre rule integrates polynomials") {
  const GaussRule r = gauss_legendre(8);
  double s = 0.0, s14 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s += r.weights[i];
    s14 += r.weights[i] * std::pow(r.nodes[i], 14);
  }
  CHECK(s == Approx(2.0).epsilon(1e-15));
  CHECK(s14 == Approx(2.0 / 15).epsilon(1e-14));
}

TEST_CASE("pi_p integral form") {
  CHECK(std::abs(pi_p_integral(2.0) - M_PI) < 1e-10);
  for (double p : {1.1, 1.5, 3.0, 4.0, 10.0}) {
    CHECK(std::abs(pi_p_integral(p) - pi_p(p)) / pi_p(p) < 1e-8);
  }
  CHECK_THROWS_AS(pi_p_integral(1.0), InvalidInput);
}

TEST_CASE("identity map constants") {
  const CuspMap id(1.0, CuspProfile(3, {1, 1}));
  CHECK(k_pq_numeric(id, 2, 1.5) == Approx(std::pow(1.0 / 3, 1.0 / 6)).epsilon(1e-12));
  CHECK(m_rp_numeric(id, 4, 2) == Approx(0.759835685651592547).epsilon(1e-10));
}

TEST_CASE("M numeric equals the exact form, including beta = 0") {
  const CuspProfile g(3, {2, 2});
  const double r = 4, p = 2;
  const double a0 = (3 + (1 - 3) * (r - p) / r) / 5;
  CHECK(m_rp_numeric(CuspMap(a0, g), r, p) == Approx(std::pow(a0, 1 / p)).epsilon(1e-10));
  CHECK(m_rp_numeric(CuspMap(0.55, g), 5, 2) == Approx(0.557862553526817878).epsilon(1e-9));
  CHECK_THROWS_AS(m_rp_numeric(CuspMap(3 * p / (5 * r), g), r, p), DivergenceError);
}

TEST_CASE("measure transport") {
  for (double a : {0.4, 0.7, 1.9}) {
    const CuspMap m(a, CuspProfile(3, {2, 1.5}));
    CHECK(std::abs(jacobian_volume_numeric(m) - 1 / 4.5) < 1e-8);
  }
}

TEST_CASE("K for n=2, gamma=3, a=0.6, p=2, q=1.2") {
  const CuspMap m(0.6, CuspProfile(2, {3}));
  const double k = k_pq_numeric(m, 2, 1.2);
  // Independent mpmath quadrature of the same integral.
  CHECK(k == Approx(1.433503344308).epsilon(1e-10));
  QuadSpec more;
  more.levels = 42;
  CHECK(k_pq_numeric(m, 2, 1.2, more) == Approx(k).epsilon(1e-6));
  QuadSpec fine;
  fine.nodes_1d = 24;
  CHECK(k_pq_numeric(m, 2, 1.2, fine) == Approx(k).epsilon(1e-10));
  CHECK(k <= *k_pq_closed(0.6, m.profile(), 2, 1.2, DistortionVariant::corrected));
}

TEST_CASE("kinks sit where s_i meets a") {
  const auto kinks = distortion_kinks(CuspMap(0.6, CuspProfile(3, {3, 3})));
  REQUIRE(kinks.size() == 1);
  CHECK(kinks[0].t == Approx(std::pow(0.6, 1 / 1.2)));
  CHECK(kinks[0].dims.size() == 2);
  CHECK(distortion_kinks(CuspMap(1.2, CuspProfile(2, {3}))).empty());
  CHECK(distortion_kinks(CuspMap(0.5, CuspProfile(3, {2, 1}))).size() == 0);  // a gamma_1 = 1
}

TEST_CASE("3D K is stable under node refinement") {
  const CuspMap m(0.7, CuspProfile(3, {2, 1.5}));
  QuadSpec fine;
  fine.nodes_1d = 24;
  CHECK(k_pq_numeric(m, 2, 1.5) == Approx(k_pq_numeric(m, 2, 1.5, fine)).epsilon(2e-6));
}

TEST_CASE("K blows up toward the divergence threshold") {
  // e = -3a + 2 for this tuple, so the integral diverges at a = 2/3.
  const CuspProfile g(2, {3});
  double last = 0.0;
  for (double a : {0.55, 0.6, 0.64, 0.66, 0.665}) {
    const double k = k_pq_numeric(CuspMap(a, g), 2, 1.2);
    CHECK(std::isfinite(k));
    CHECK(k > last);
    last = k;
  }
  CHECK(last > 3.0);
  CHECK_THROWS_AS(k_pq_numeric(CuspMap(2.0 / 3.0 + 1e-9, g), 2, 1.2), DivergenceError);
  CHECK_THROWS_AS(k_pq_numeric(CuspMap(0.6, g), 2, 2.5), InvalidInput);
}

TEST_CASE("adding dyadic levels changes values by less than tol") {
  const CuspMap m(0.5, CuspProfile(3, {2, 2}));
  QuadSpec base, more;
  more.levels = base.levels + 2;
  CHECK(k_pq_numeric(m, 2, 1.5, more) == Approx(k_pq_numeric(m, 2, 1.5, base)).epsilon(1e-8));
  CHECK(m_rp_numeric(m, 5, 2, more) == Approx(m_rp_numeric(m, 5, 2, base)).epsilon(1e-8));
}

TEST_CASE("precision error when refinement cannot converge") {
  QuadSpec tight;
  tight.levels = 2;
  tight.max_levels = 3;
  tight.tol = 1e-15;
  const CuspMap m(0.66, CuspProfile(2, {3}));
  CHECK_THROWS_AS(k_pq_numeric(m, 2, 1.2, tight), PrecisionError);
  QuadSpec bad;
  bad.nodes_1d = 1;
  CHECK_THROWS_AS(k_pq_numeric(m, 2, 1.2, bad), InvalidInput);
}

TEST_CASE("numeric K never exceeds the corrected closed form") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0;
  while (done < 12) {
    const int n = u(rng) < 0.5 ? 2 : 3;
    std::vector<double> g(n - 1);
    for (auto& x : g) x = 1 + 3 * u(rng);
    const CuspProfile pr(n, g);
    const double p = 1.05 + (std::min(pr.gamma_total(), 4.0) - 1.1) * u(rng);
    if (!(p < pr.gamma_total())) continue;
    const double q = 1 + (p - 1) * (0.05 + 0.9 * u(rng));
    const AInterval iv = admissible_a_interval(pr, p, q);
    if (!iv.nonempty) continue;
    const double a = iv.lo + (iv.hi - iv.lo) * (0.05 + 0.9 * u(rng));
    const double kc = *k_pq_closed(a, pr, p, q, DistortionVariant::corrected);
    CHECK(k_pq_numeric(CuspMap(a, pr), p, q) <= kc * (1 + 1e-6));
    ++done;
  }
}
