#include <cmath>
#include <random>

#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>

#include "doctest.h"
#include "nbound/cusp_map.hpp"
#include "nbound/errors.hpp"
#include "nbound/quadrature.hpp"

using namespace nb;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd pt(std::initializer_list<double> xs) {
  VectorXd v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Point of H_1 from a unit-cube sample, kept away from the faces.
VectorXd to_h1(const std::vector<double>& u) {
  const int n = static_cast<int>(u.size());
  VectorXd x(n);
  x[n - 1] = 0.01 + 0.98 * u[n - 1];
  for (int i = 0; i + 1 < n; ++i) x[i] = (0.01 + 0.98 * u[i]) * x[n - 1];
  return x;
}

MatrixXd fd_jacobian(const CuspMap& m, const VectorXd& x, double step) {
  const int n = m.dimension();
  MatrixXd d(n, n);
  for (int j = 0; j < n; ++j) {
    VectorXd hi = x, lo = x;
    const double h = step * x[j];
    hi[j] += h;
    lo[j] -= h;
    d.col(j) = (m.eval(hi) - m.eval(lo)) / (2 * h);
  }
  return d;
}

}  // namespace

TEST_CASE("identity map") {
  CuspMap id(1.0, CuspProfile(3, {1, 1}));
  const VectorXd x = pt({0.1, 0.3, 0.5});
  CHECK((id.eval(x) - x).norm() < 1e-15);
  CHECK(id.jacobian_det(x) == doctest::Approx(1.0));
  CHECK((id.jacobian_matrix(x) - MatrixXd::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("map_eval example") {
  CuspMap m(2.0, CuspProfile(3, {2, 2}));
  const VectorXd y = m.eval(pt({0.25, 0.25, 0.5}));
  CHECK(y[0] == doctest::Approx(0.03125).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(0.03125).epsilon(1e-14));
  CHECK(y[2] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("boundary points are rejected") {
  CuspMap m(0.7, CuspProfile(2, {2}));
  CHECK_THROWS_AS(m.eval(pt({0.0, 0.5})), InvalidInput);
  CHECK_THROWS_AS(m.eval(pt({0.6, 0.5})), InvalidInput);
  CHECK_THROWS_AS(m.jacobian_det(pt({0.1, 1.0})), InvalidInput);
  CHECK_THROWS_AS(CuspMap(0.0, CuspProfile(2, {2})), InvalidInput);
}

TEST_CASE("Sobol samples land in H_g and invert") {
  for (const CuspMap& m : {CuspMap(0.6, CuspProfile(3, {2, 1.5})), CuspMap(1.7, CuspProfile(2, {3})),
                           CuspMap(0.45, CuspProfile(3, {3, 1}))}) {
    const int n = m.dimension();
    boost::random::sobol gen(n);
    boost::random::uniform_01<double> u01;
    int inside = 0;
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      std::vector<double> u(n);
      for (auto& x : u) x = u01(gen);
      const VectorXd x = to_h1(u);
      const VectorXd y = m.eval(x);
      inside += m.in_target(y);
      worst = std::max(worst, (m.inverse(y) - x).norm() / x.norm());
    }
    CHECK(inside == 10000);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("jacobian_det examples") {
  CHECK(CuspMap(2.0, CuspProfile(3, {2, 2})).jacobian_det(pt({0.1, 0.2, 0.5})) ==
        doctest::Approx(0.015625).epsilon(1e-14));
  CHECK(CuspMap(1.5, CuspProfile(2, {3})).jacobian_det(pt({0.3, 0.8})) ==
        doctest::Approx(0.6144).epsilon(1e-14));
}

TEST_CASE("jacobian matrix against determinant and finite differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const int n = 2 + k % 2;
    std::vector<double> g(n - 1), s(n);
    for (auto& x : g) x = 1.0 + 3.0 * u(rng);
    for (auto& x : s) x = u(rng);
    const CuspMap m(0.2 + 2.0 * u(rng), CuspProfile(n, g));
    const VectorXd x = to_h1(s);
    const MatrixXd j = m.jacobian_matrix(x);
    const double det = m.jacobian_det(x);
    CHECK(det > 0.0);
    CHECK(std::abs(j.determinant() - det) <= 1e-12 * det);
    CHECK(std::abs(fd_jacobian(m, x, 1e-6).determinant() - det) <= 1e-6 * det);
    CHECK((fd_jacobian(m, x, 1e-6) - j).norm() <= 1e-6 * j.norm());
    for (int r = 1; r < n; ++r)
      for (int c = 0; c < r; ++c) CHECK(j(r, c) == 0.0);
  }
}

TEST_CASE("radicand variants differ by 2(n-1)") {
  const CuspProfile id(3, {1, 1});
  CHECK(distortion_radicand(1.0, id, DistortionVariant::paper_simplified) == doctest::Approx(-1.0));
  CHECK(distortion_radicand(1.0, id, DistortionVariant::corrected) == doctest::Approx(3.0));
  const CuspProfile g(3, {2, 1.5});
  for (double a : {0.3, 0.8, 1.4}) {
    double direct = (a * a) + 2.0;
    for (double gi : g.gammas()) direct += (a * gi - 1) * (a * gi - 1);
    CHECK(distortion_radicand(a, g, DistortionVariant::corrected) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(distortion_radicand(a, g, DistortionVariant::corrected) -
              distortion_radicand(a, g, DistortionVariant::paper_simplified) ==
          doctest::Approx(4.0));
  }
}

TEST_CASE("distortion bound examples") {
  CuspMap id(1.0, CuspProfile(3, {1, 1}));
  const VectorXd x = pt({0.2, 0.1, 0.4});
  CHECK(id.distortion_bound(x) == doctest::Approx(std::sqrt(3.0)));
  CHECK(std::isnan(id.distortion_bound(x, DistortionVariant::paper_simplified)));
  CHECK(spectral_norm(id.jacobian_matrix(x)) == doctest::Approx(1.0));

  CuspMap m(2.0, CuspProfile(3, {2, 2}));
  CHECK(m.distortion_bound(pt({0.1, 0.3, 0.5})) == doctest::Approx(0.5 * std::sqrt(24.0)).epsilon(1e-14));
}

TEST_CASE("Frobenius bound dominates the spectral norm") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const int n = 2 + k % 2;
    std::vector<double> g(n - 1), s(n);
    for (auto& x : g) x = 1.0 + 3.0 * u(rng);
    for (auto& x : s) x = u(rng);
    const CuspMap m(0.2 + 2.0 * u(rng), CuspProfile(n, g));
    const VectorXd x = to_h1(s);
    const MatrixXd j = m.jacobian_matrix(x);
    const double spec = spectral_norm(j);
    CHECK(spec <= j.norm() * (1 + 1e-14));
    CHECK(spec <= m.distortion_bound(x) * (1 + 1e-12));
    const double rescale = std::pow(x[n - 1], m.a() - 1.0);
    CHECK(rescale * m.rescaled_jacobian(x).norm() <= m.distortion_bound(x) * (1 + 1e-14));
    CHECK(m.distortion_bound(x) / rescale ==
          doctest::Approx(std::sqrt(distortion_radicand(m.a(), m.profile(), DistortionVariant::corrected)))
              .epsilon(1e-13));
  }
}

TEST_CASE("spectral norm against SVD") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 2;
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = z(rng);
    const double ref = Eigen::JacobiSVD<MatrixXd>(a).singularValues()[0];
    CHECK(spectral_norm(a) == doctest::Approx(ref).epsilon(1e-10));
  }
  MatrixXd two(2, 2);
  two << 0.5, 0.3, 0.0, 0.6;
  CHECK(spectral_norm(two) == doctest::Approx(0.72820159555798791).epsilon(1e-14));
  CHECK(spectral_norm(MatrixXd::Zero(3, 3)) == 0.0);
}

TEST_CASE("measure transport: int J = 1/gamma") {
  for (const CuspMap& m : {CuspMap(0.7, CuspProfile(3, {2, 1.5})), CuspMap(1.0, CuspProfile(2, {3})),
                           CuspMap(1.3, CuspProfile(3, {1, 1}))}) {
    CHECK(std::abs(jacobian_volume_numeric(m) - 1.0 / m.profile().gamma_total()) < 1e-8);
  }
}
