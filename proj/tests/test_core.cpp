#include <cmath>
#include <random>

#include "doctest.h"
#include "nbound/core.hpp"
#include "nbound/errors.hpp"

using namespace nb;

TEST_CASE("profile gamma_total") {
  CHECK(CuspProfile(3, {1, 1}).gamma_total() == 3.0);
  CHECK(CuspProfile(3, {1, 1}).is_reference());
  CHECK(CuspProfile(3, {2, 2}).gamma_total() == 5.0);
  CHECK(CuspProfile(2, {3}).gamma_total() == 4.0);
  CHECK(cusp_profile_new(3, {2, 1.5}).gamma_square_sum() == doctest::Approx(6.25));
}

TEST_CASE("profile rejects bad input") {
  CHECK_THROWS_AS(CuspProfile(1, {}), InvalidInput);
  CHECK_THROWS_AS(CuspProfile(3, {2}), InvalidInput);
  CHECK_THROWS_AS(CuspProfile(2, {0.9}), InvalidInput);
}

TEST_CASE("gamma_total >= n, equality only for H_1") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 4.0);
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + k % 3;
    std::vector<double> g(n - 1);
    for (auto& x : g) x = u(rng);
    CuspProfile pr(n, g);
    CHECK(pr.gamma_total() > n);
  }
}

TEST_CASE("admissible a interval examples") {
  const AInterval a = admissible_a_interval(CuspProfile(3, {1, 1}), 2, 1.5);
  CHECK(a.nonempty);
  CHECK(a.lo == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.hi == doctest::Approx(2.0).epsilon(1e-15));

  const AInterval b = admissible_a_interval(CuspProfile(3, {2, 2}), 2, 1.5);
  CHECK(b.lo == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(b.hi == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(b.contains(4.0 / 9.0));
  CHECK(b.clamp(0.1) == b.lo);

  CHECK_THROWS_AS(admissible_a_interval(CuspProfile(3, {1, 1}), 3, 1.5), InvalidInput);
  CHECK_THROWS_AS(admissible_a_interval(CuspProfile(3, {1, 1}), 2, 2.5), InvalidInput);
}

TEST_CASE("interval hi decreases in q, nonempty when n > p") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  while (checked < 300) {
    const int n = 2 + static_cast<int>(u(rng) * 2);
    std::vector<double> g(n - 1);
    for (auto& x : g) x = 1.0 + 3.0 * u(rng);
    CuspProfile pr(n, g);
    const double p = 1.0 + (std::min<double>(n, pr.gamma_total()) - 1.0) * (0.05 + 0.9 * u(rng));
    const double q1 = 1.0 + (p - 1.0) * (0.05 + 0.4 * u(rng));
    const double q2 = q1 + (p - q1) * 0.5;
    const AInterval i1 = admissible_a_interval(pr, p, q1);
    const AInterval i2 = admissible_a_interval(pr, p, q2);
    CHECK(i2.hi < i1.hi);
    CHECK(i1.nonempty);
    CHECK(i2.nonempty);
    ++checked;
  }
}

TEST_CASE("exponent predicates") {
  ExponentConfig e{2, 1.5, 2.5};
  CHECK(e.delta() == doctest::Approx(1 / 1.5 - 1 / 2.5));
  CHECK(e.ordered());
  CHECK(e.admissible_for(CuspProfile(3, {1, 1})));
  CHECK_FALSE(e.admissible_for(CuspProfile(2, {1})));
  CHECK(e.sobolev_range(3));
  CHECK(e.poincare_finite(3));
  CHECK_FALSE((ExponentConfig{2, 1.5, 4}).poincare_finite(3));
}

TEST_CASE("volumes") {
  CHECK(h1_volume(2) == 0.5);
  CHECK(h1_volume(3) == doctest::Approx(1.0 / 3.0));
  CHECK(h1_volume(10) == doctest::Approx(0.1));
  CHECK(unit_ball_volume(2) == doctest::Approx(M_PI));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * M_PI / 3.0));
}

TEST_CASE("key-value round trip") {
  KeyValues kv = parse_key_values("# comment\nn = 3\ngammas = 2, 1.5\n\np=2 # trailing\nq = 1.5\nr = 2.5\n");
  CHECK(kv.at("n") == "3");
  CHECK(kv.at("p") == "2");
  const CuspProfile pr = read_profile(kv);
  CHECK(pr == CuspProfile(3, {2, 1.5}));
  const ExponentConfig e = read_exponents(kv);
  CHECK(e.r == 2.5);

  KeyValues out;
  const CuspProfile odd(3, {1.0 / 3.0 + 1.0, std::sqrt(2.0)});
  write_profile(out, odd);
  write_exponents(out, ExponentConfig{std::acos(-1.0), 1.1, 7.0 / 3.0});
  const KeyValues back = parse_key_values(format_key_values(out));
  CHECK(read_profile(back) == odd);
  CHECK(read_exponents(back).p == std::acos(-1.0));
  CHECK(read_exponents(back).r == 7.0 / 3.0);
}

TEST_CASE("doubles print shortest round-trip") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5, 9.869604401089358}) {
    CHECK(parse_double("x", format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("config errors name the key") {
  try {
    read_profile(parse_key_values("n = 3\ngammas = 1, x\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "gammas");
  }
  CHECK_THROWS_AS(read_exponents(parse_key_values("p = 2\nq = 1.5\n")), ConfigError);
  CHECK_THROWS_AS(parse_key_values("no equals sign\n"), ConfigError);
}
