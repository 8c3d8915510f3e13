#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nbound/core.hpp"
#include "nbound/fem/space.hpp"

namespace nb::fem {

struct Disc {
  Point centre{0.0, 0.0};
  double radius = 0.0;
};

struct Rect {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};
};

/// Closed set given as a union of discs and rectangles.
struct Plate {
  std::vector<Disc> discs;
  std::vector<Rect> rects;

  bool contains(const Point& x, double slack = 1e-12) const;
  bool empty() const noexcept { return discs.empty() && rects.empty(); }
};

struct CondenserSpec {
  Plate plate0;  // f = 0
  Plate plate1;  // f = 1
};

/// Per-vertex pin: -1 free, 0 or 1 fixed value.
using Pins = std::vector<std::int8_t>;

Pins pins_for(const TriMesh& mesh, const CondenserSpec& cond);

struct CapacityOpts {
  double grad_tol = 1e-8;  // Euclidean norm of the free-node gradient
  int max_newton = 200;
};

struct CapacityResult {
  double value = 0.0;
  ScalarField field;
  double gradient_norm = 0.0;
  int newton_steps = 0;
  std::size_t pinned0 = 0;
  std::size_t pinned1 = 0;
};

/// Discrete p-capacity: min sum |T| |grad f|^p with f pinned to 0 and 1 on the plates.
CapacityResult capacity_p(const TriMesh& mesh, const Pins& pins, double p, const CapacityOpts& opts = {});
CapacityResult capacity_p(const TriMesh& mesh, const CondenserSpec& cond, double p,
                          const CapacityOpts& opts = {});

/// Radial p-capacity of the annulus inner <= |x| <= outer between its two boundary circles.
double annulus_capacity(double inner, double outer, double p);

/// K = sup (|D phi|^p / J)^{1/p} of the planar cusp map, +inf when unbounded.
double transfer_distortion(const CuspProfile& profile, double a, double p);

struct TransferReport {
  double a = 0.0;
  double p = 0.0;
  double h = 0.0;
  double k = 0.0;
  double cap_pullback = 0.0;  // on the reference domain, plates pulled back
  double cap_original = 0.0;  // on the cusp domain
  double ratio = 0.0;         // (cap_pullback / cap_original)^{1/p}
  double mesh_tol = 0.0;
  bool pass = false;
};

/// Builds H_1 and H_g meshes, pulls the plates back through the cusp map, and
/// compares the capacities with the distortion constant.
TransferReport capacity_transfer_check(const CuspProfile& profile, double a, double p,
                                       const CondenserSpec& cond, double h, int grading_levels = 12,
                                       double mesh_tol = 0.02);

}  // namespace nb::fem
