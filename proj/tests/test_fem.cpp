#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nbound/errors.hpp"
#include "nbound/fem/capacity.hpp"
#include "nbound/fem/mesh.hpp"
#include "nbound/fem/spectrum.hpp"

using namespace nb;
using namespace nb::fem;
using doctest::Approx;

namespace {

Pins ring_pins(const TriMesh& m, double inner, double outer) {
  Pins pins(m.vertex_count(), -1);
  for (std::size_t i = 0; i < m.vertex_count(); ++i) {
    const double r = m.vertices[i].norm();
    if (r <= inner * (1 + 1e-9)) pins[i] = 0;
    if (r >= outer * (1 - 1e-9)) pins[i] = 1;
  }
  return pins;
}

}  // namespace

TEST_CASE("mesh areas and audits") {
  const TriMesh tri = mesh_cusp_2d(1.0, 0.02, 12);
  CHECK(tri.area() == Approx(0.5).epsilon(1e-3));
  const TriMesh c3 = mesh_cusp_2d(3.0, 0.01, 12);
  CHECK(std::abs(c3.area() - 0.25) < 0.005 * 0.25);
  CHECK(mesh_rectangle(2, 1, 0.05).area() == Approx(2.0));
  CHECK(mesh_disc(1, 0.02).area() == Approx(M_PI).epsilon(2e-3));
  CHECK(mesh_annulus(1, 2, 0.05).area() == Approx(3 * M_PI).epsilon(5e-3));

  for (const TriMesh& m : {tri, c3, mesh_cusp_2d(1.5, 0.03, 12), mesh_cusp_2d(2.0, 0.03, 12),
                           mesh_rectangle(1, 1, 0.05), mesh_disc(1, 0.05), mesh_annulus(1, 2, 0.1)}) {
    const MeshAudit a = audit(m);
    CHECK(a.ok());
    CHECK(a.min_angle_deg >= 15.0);
  }
  CHECK(audit(mesh_disc(1, 0.05)).euler_characteristic == 1);
  CHECK(audit(mesh_annulus(1, 2, 0.1)).euler_characteristic == 0);
  CHECK(c3.grading.y_min == Approx(1e-4));
  CHECK_THROWS_AS(mesh_cusp_2d(0.5, 0.02, 12), InvalidInput);
  CHECK_THROWS_AS(mesh_cusp_2d(2.0, 0.7, 12), InvalidInput);
}

TEST_CASE("mesh and field text round trip") {
  const TriMesh m = mesh_cusp_2d(2.0, 0.1, 6);
  std::stringstream s;
  write_mesh(s, m);
  const TriMesh back = read_mesh(s);
  REQUIRE(back.vertex_count() == m.vertex_count());
  REQUIRE(back.triangles == m.triangles);
  for (std::size_t i = 0; i < m.vertex_count(); ++i) CHECK(back.vertices[i] == m.vertices[i]);

  Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(7, -1.0 / 3, 2.0 / 7);
  std::stringstream fs;
  write_field(fs, f);
  CHECK(read_field(fs) == f);
}

TEST_CASE("p_mean") {
  const TriMesh m = mesh_rectangle(2, 1, 0.1);
  ScalarField f(m.vertex_count());
  for (std::size_t i = 0; i < m.vertex_count(); ++i) f[i] = m.vertices[i].x() * m.vertices[i].x();
  // P1 mean of x^2 over [0,2] is slightly above 4/3; the midpoint rule is exact for P1 quadratics.
  const P1Space space(m);
  const Eigen::VectorXd w = space.midpoint_weights();
  const Eigen::VectorXd s = space.midpoint_values(f);
  CHECK(p_mean(f, m, 2.0) == Approx(w.dot(s) / w.sum()).epsilon(1e-14));

  CHECK(p_mean(ScalarField::Constant(m.vertex_count(), 5.0), m, 3.0) == 5.0);

  ScalarField sign(m.vertex_count());
  for (std::size_t i = 0; i < m.vertex_count(); ++i) {
    const double x = m.vertices[i].x();
    sign[i] = x < 1 - 1e-12 ? -1.0 : (x > 1 + 1e-12 ? 1.0 : 0.0);
  }
  CHECK(std::abs(p_mean(sign, m, 4.0)) < 1e-12);
}

TEST_CASE("Neumann eigenvalue oracles") {
  const NeumannEigen sq = mu2_fem(mesh_rectangle(1, 1, 0.02));
  CHECK(sq.value == Approx(M_PI * M_PI).epsilon(0.01));
  CHECK(std::abs(sq.mean) < 1e-10);
  CHECK(sq.residual < 1e-6);

  CHECK(mu2_fem(mesh_rectangle(2, 1, 0.02)).value == Approx(M_PI * M_PI / 4).epsilon(0.01));
  CHECK(mu2_fem(mesh_disc(1, 0.02)).value == Approx(3.38995771667188873).epsilon(0.01));
}

TEST_CASE("dense and iterative eigensolvers agree") {
  const TriMesh m = mesh_cusp_2d(2.0, 0.04, 12);
  EigenOpts dense, iterative;
  dense.dense_limit = 100000;
  iterative.dense_limit = 0;
  const NeumannEigen a = mu2_fem(m, dense), b = mu2_fem(m, iterative);
  CHECK(a.dense);
  CHECK_FALSE(b.dense);
  CHECK(a.value == Approx(b.value).epsilon(1e-9));
  CHECK(std::abs(b.mean) < 1e-10);
}

TEST_CASE("refinement converges from above at second order") {
  double prev = 0.0, prev_gap = 0.0;
  const double exact = M_PI * M_PI;
  for (double h : {0.1, 0.05, 0.025}) {
    const double v = mu2_fem(mesh_rectangle(1, 1, h)).value;
    CHECK(v > exact);
    if (prev > 0.0) {
      CHECK(v < prev);
      const double gap = v - exact;
      if (prev_gap > 0.0) {
        const double ratio = prev_gap / gap;
        CHECK(ratio > 1.0);
        CHECK(ratio < 16.0);
      }
      prev_gap = gap;
    } else {
      prev_gap = v - exact;
    }
    prev = v;
  }
}

TEST_CASE("tip truncation effect is small") {
  const double h = 0.02;
  const double base = mu2_fem(mesh_cusp_2d(3.0, h, 12)).value;
  const double deeper = mu2_fem(mesh_cusp_2d(3.0, h, 12, h * h / 2)).value;
  CHECK(std::abs(base - deeper) / base < 0.005);
}

TEST_CASE("Rayleigh descent matches mu2 at p = 2") {
  RayleighOpts o;
  o.restarts = 2;
  const TriMesh sq = mesh_rectangle(1, 1, 0.05);
  const RayleighResult r = mup_rayleigh(sq, 2.0, o);
  CHECK(r.value == Approx(mu2_fem(sq).value).epsilon(0.005));
  CHECK(r.discretization);

  const TriMesh cusp = mesh_cusp_2d(3.0, 0.04, 12);
  CHECK(mup_rayleigh(cusp, 2.0, o).value == Approx(mu2_fem(cusp).value).epsilon(0.01));
}

TEST_CASE("Rayleigh descent at p != 2") {
  RayleighOpts o;
  o.restarts = 2;
  const TriMesh sq = mesh_rectangle(1, 1, 0.05);
  const P1Space space(sq);
  const RayleighResult r = mup_rayleigh(sq, 3.0, o);
  CHECK(r.value == Approx(rayleigh_quotient(space, r.field, 3.0)).epsilon(1e-12));
  // 1D profile cos(pi x) is admissible, so the minimum lies below its quotient.
  ScalarField c(sq.vertex_count());
  for (std::size_t i = 0; i < sq.vertex_count(); ++i) c[i] = std::cos(M_PI * sq.vertices[i].x());
  CHECK(r.value <= rayleigh_quotient(space, c, 3.0) * (1 + 1e-9));
  // Convex-domain lower bound (pi_p / d)^p.
  CHECK(r.value > std::pow(3.14 / std::sqrt(2.0), 3.0) * 0.5);

  RayleighOpts same = o;
  CHECK(mup_rayleigh(sq, 3.0, same).value == r.value);
}

TEST_CASE("annulus capacities") {
  for (double p : {2.0, 3.0, 1.8}) {
    const TriMesh m = mesh_annulus(1, 2, 0.04);
    const CapacityResult c = capacity_p(m, ring_pins(m, 1, 2), p);
    CHECK(c.value == Approx(annulus_capacity(1, 2, p)).epsilon(0.02));
    CHECK(c.gradient_norm < 1e-8);
  }
  CHECK(annulus_capacity(1, 2, 2) == Approx(2 * M_PI / std::log(2.0)).epsilon(1e-14));
  // Independent mpmath value of the radial integral.
  CHECK(annulus_capacity(1, 2, 3) == Approx(9.155271918543056).epsilon(1e-13));
  CHECK(annulus_capacity(1, 2, 1.8) == Approx(9.01961299104070).epsilon(1e-12));
}

TEST_CASE("capacity grows as plates approach") {
  const TriMesh m = mesh_rectangle(1, 1, 0.05);
  double last = 0.0;
  for (double gap : {0.8, 0.6, 0.4, 0.2}) {
    CondenserSpec c;
    c.plate0.rects.push_back({{0, 0}, {0.1, 1}});
    c.plate1.rects.push_back({{0.1 + gap, 0}, {1, 1}});
    const double v = capacity_p(m, c, 2.5).value;
    CHECK(v > last);
    last = v;
  }
}

TEST_CASE("capacity input errors") {
  const TriMesh m = mesh_rectangle(1, 1, 0.1);
  CondenserSpec none;
  none.plate0.discs.push_back({{5, 5}, 0.1});
  none.plate1.rects.push_back({{0.9, 0}, {1, 1}});
  CHECK_THROWS_AS(capacity_p(m, none, 2), InvalidInput);

  CondenserSpec overlap;
  overlap.plate0.rects.push_back({{0, 0}, {0.6, 1}});
  overlap.plate1.rects.push_back({{0.4, 0}, {1, 1}});
  CHECK_THROWS_AS(pins_for(m, overlap), InvalidInput);

  // Two disjoint triangles, each touching only one plate.
  TriMesh two;
  two.vertices = {{0, 0}, {1, 0}, {0, 1}, {3, 0}, {4, 0}, {3, 1}};
  two.triangles = {{0, 1, 2}, {3, 4, 5}};
  CondenserSpec split;
  split.plate0.discs.push_back({{0, 0}, 0.1});
  split.plate1.discs.push_back({{3, 0}, 0.1});
  CHECK_THROWS_AS(capacity_p(two, split, 2), InvalidInput);
}

TEST_CASE("capacity transfer: identity") {
  CondenserSpec c;
  c.plate0.rects.push_back({{0, 0.9}, {1, 1}});
  c.plate1.rects.push_back({{0, 0}, {1, 0.5}});
  const TransferReport r = capacity_transfer_check(CuspProfile(2, {1}), 1.0, 2.0, c, 0.04);
  CHECK(r.k == Approx(1.0));
  CHECK(r.ratio == Approx(1.0).epsilon(1e-9));
  CHECK(r.pass);
}

TEST_CASE("capacity transfer: gamma = 1.5, a = 0.25, p = 1.8") {
  CondenserSpec c;
  c.plate0.rects.push_back({{0, 0.9}, {1, 1}});
  c.plate1.rects.push_back({{0, 0}, {1, 0.5}});
  const CuspProfile g(2, {1.5});
  const TransferReport coarse = capacity_transfer_check(g, 0.25, 1.8, c, 0.02);
  const TransferReport fine = capacity_transfer_check(g, 0.25, 1.8, c, 0.01);
  CHECK(coarse.pass);
  CHECK(fine.pass);
  CHECK(fine.k == Approx(2.563871).epsilon(1e-6));
  // Frozen after agreement with h = 0.005 (0.514597) within 2%.
  CHECK(fine.ratio == Approx(0.515310).epsilon(1e-4));
  CHECK(coarse.ratio == Approx(fine.ratio).epsilon(0.02));
}

TEST_CASE("capacity transfer: infinite K is a precondition error") {
  CondenserSpec c;
  c.plate0.rects.push_back({{0, 0.9}, {1, 1}});
  c.plate1.rects.push_back({{0, 0}, {1, 0.5}});
  CHECK(std::isinf(transfer_distortion(CuspProfile(2, {1.5}), 0.4, 1.8)));
  CHECK_THROWS_AS(capacity_transfer_check(CuspProfile(2, {1.5}), 0.4, 1.8, c, 0.05), InvalidInput);
  CHECK_THROWS_AS(capacity_transfer_check(CuspProfile(2, {2}), 0.0, 2.0, c, 0.05), InvalidInput);
}
