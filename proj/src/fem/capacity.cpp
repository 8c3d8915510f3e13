#include "nbound/fem/capacity.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SparseCholesky>
#include <boost/math/tools/minima.hpp>

#include "nbound/errors.hpp"

namespace nb::fem {

bool Plate::contains(const Point& x, double slack) const {
  for (const auto& d : discs) {
    if ((x - d.centre).norm() <= d.radius + slack) return true;
  }
  for (const auto& r : rects) {
    if (x.x() >= r.lo.x() - slack && x.x() <= r.hi.x() + slack && x.y() >= r.lo.y() - slack &&
        x.y() <= r.hi.y() + slack) {
      return true;
    }
  }
  return false;
}

Pins pins_for(const TriMesh& mesh, const CondenserSpec& cond) {
  Pins pins(mesh.vertices.size(), -1);
  for (std::size_t i = 0; i < pins.size(); ++i) {
    const bool in0 = cond.plate0.contains(mesh.vertices[i]);
    const bool in1 = cond.plate1.contains(mesh.vertices[i]);
    if (in0 && in1) throw InvalidInput("condenser: plates share a mesh vertex");
    if (in0) pins[i] = 0;
    if (in1) pins[i] = 1;
  }
  return pins;
}

namespace {

std::vector<int> components(const TriMesh& mesh) {
  std::vector<int> parent(mesh.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& t : mesh.triangles) {
    const int r0 = find(t[0]);
    for (int k = 1; k < 3; ++k) {
      const int rk = find(t[k]);
      if (rk != r0) parent[rk] = r0;
    }
  }
  std::vector<int> label(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) label[i] = find(int(i));
  return label;
}

// Restriction of a symmetric matrix to the free nodes, with the pinned columns moved to `rhs`.
SparseMatrix free_block(const SparseMatrix& a, const std::vector<int>& free_index) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(a.nonZeros()));
  for (int col = 0; col < a.outerSize(); ++col) {
    if (free_index[col] < 0) continue;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      if (free_index[it.row()] >= 0) trip.emplace_back(free_index[it.row()], free_index[col], it.value());
    }
  }
  const int nf = *std::max_element(free_index.begin(), free_index.end()) + 1;
  SparseMatrix out(nf, nf);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& full, const std::vector<int>& free_index, int nf) {
  Eigen::VectorXd out(nf);
  for (std::size_t i = 0; i < free_index.size(); ++i)
    if (free_index[i] >= 0) out[free_index[i]] = full[Eigen::Index(i)];
  return out;
}

}  // namespace

CapacityResult capacity_p(const TriMesh& mesh, const Pins& pins_in, double p, const CapacityOpts& opts) {
  if (!(p > 1.0)) throw InvalidInput("capacity_p: need p > 1");
  if (pins_in.size() != mesh.vertices.size()) throw InvalidInput("capacity_p: pin count differs from vertex count");
  CapacityResult res;
  for (auto v : pins_in) {
    res.pinned0 += v == 0;
    res.pinned1 += v == 1;
  }
  if (res.pinned0 == 0) throw InvalidInput("capacity_p: plate0 covers no mesh vertex");
  if (res.pinned1 == 0) throw InvalidInput("capacity_p: plate1 covers no mesh vertex");

  // A component touching one plate only would make the problem degenerate.
  Pins pins = pins_in;
  const std::vector<int> comp = components(mesh);
  std::vector<int> touches(mesh.vertices.size(), 0);
  for (std::size_t i = 0; i < pins.size(); ++i) {
    if (pins[i] == 0) touches[comp[i]] |= 1;
    if (pins[i] == 1) touches[comp[i]] |= 2;
  }
  for (std::size_t i = 0; i < pins.size(); ++i) {
    const int t = touches[comp[i]];
    if (t == 1 || t == 2) throw InvalidInput("capacity_p: a mesh component contains only one plate");
    if (t == 0) pins[i] = 0;  // untouched component: any constant is optimal
  }

  std::vector<int> free_index(pins.size(), -1);
  int nf = 0;
  ScalarField f = ScalarField::Zero(Eigen::Index(pins.size()));
  for (std::size_t i = 0; i < pins.size(); ++i) {
    if (pins[i] < 0) free_index[i] = nf++;
    else f[Eigen::Index(i)] = pins[i];
  }

  const P1Space space(mesh);
  const SparseMatrix k = space.stiffness();
  if (nf > 0) {
    const SparseMatrix kff = free_block(k, free_index);
    const Eigen::VectorXd rhs = -gather(k * f, free_index, nf);
    Eigen::SimplicialLDLT<SparseMatrix> solver(kff);
    if (solver.info() != Eigen::Success) throw NumericalError("capacity_p: stiffness factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);
    for (std::size_t i = 0; i < pins.size(); ++i)
      if (free_index[i] >= 0) f[Eigen::Index(i)] = x[free_index[i]];
  }

  if (p != 2.0 && nf > 0) {
    const auto energy = [&](const ScalarField& g) { return space.gradient_energy(g, p); };
    double e = energy(f);
    Eigen::VectorXd grad = gather(space.gradient_energy_derivative(f, p), free_index, nf);
    const double mean_g2 = std::max(f.dot(k * f) / space.area(), 1e-300);
    for (res.newton_steps = 0; grad.norm() >= opts.grad_tol; ++res.newton_steps) {
      if (res.newton_steps >= opts.max_newton) {
        throw ConvergenceError("capacity_p: Newton iteration did not converge", grad.norm());
      }
      SparseMatrix h = free_block(space.gradient_energy_hessian(f, p, 1e-12 * mean_g2), free_index);
      h += (1e-12 * std::pow(mean_g2, 0.5 * p - 1.0)) * free_block(k, free_index);
      Eigen::SimplicialLDLT<SparseMatrix> solver(h);
      if (solver.info() != Eigen::Success) throw NumericalError("capacity_p: Hessian factorization failed");
      const Eigen::VectorXd step = -solver.solve(grad);
      const double slope = grad.dot(step);

      bool accepted = false;
      ScalarField trial = f;
      Eigen::VectorXd trial_grad;
      for (double alpha = 1.0; alpha > 1e-12; alpha *= 0.5) {
        for (std::size_t i = 0; i < pins.size(); ++i)
          if (free_index[i] >= 0) trial[Eigen::Index(i)] = f[Eigen::Index(i)] + alpha * step[free_index[i]];
        const double te = energy(trial);
        trial_grad = gather(space.gradient_energy_derivative(trial, p), free_index, nf);
        // Near the optimum energy differences drown in rounding; fall back on the gradient.
        if (te <= e + 1e-4 * alpha * slope ||
            (te <= e + 1e-13 * std::abs(e) && trial_grad.norm() < grad.norm())) {
          f = trial;
          e = te;
          grad = trial_grad;
          accepted = true;
          break;
        }
      }
      if (!accepted) throw ConvergenceError("capacity_p: line search stalled", grad.norm());
    }
    res.gradient_norm = grad.norm();
  }

  res.value = space.gradient_energy(f, p);
  res.field = std::move(f);
  return res;
}

CapacityResult capacity_p(const TriMesh& mesh, const CondenserSpec& cond, double p, const CapacityOpts& opts) {
  return capacity_p(mesh, pins_for(mesh, cond), p, opts);
}

double annulus_capacity(double inner, double outer, double p) {
  if (!(inner > 0.0 && outer > inner)) throw InvalidInput("annulus_capacity: need 0 < inner < outer");
  if (!(p > 1.0)) throw InvalidInput("annulus_capacity: need p > 1");
  if (p == 2.0) return 2.0 * M_PI / std::log(outer / inner);
  const double s = (p - 2.0) / (p - 1.0);
  return 2.0 * M_PI * std::pow((p - 2.0) / ((p - 1.0) * (std::pow(outer, s) - std::pow(inner, s))), p - 1.0);
}

double transfer_distortion(const CuspProfile& profile, double a, double p) {
  if (profile.dimension() != 2) throw InvalidInput("transfer_distortion: planar profiles only");
  if (!(a > 0.0) || !(p > 1.0)) throw InvalidInput("transfer_distortion: need a > 0 and p > 1");
  const double g1 = profile.gammas()[0];
  const double gamma = profile.gamma_total();
  // |D phi| / J^{1/p} = t^e a^{-1/p} |R(u, t)|, largest at u = 1.
  const double e = a - 1.0 - (a * gamma - 2.0) / p;
  if (e < -1e-14) return std::numeric_limits<double>::infinity();
  const double c = a * g1 - 1.0;
  const auto log_ratio = [&](double log_t) {
    const double s = std::exp(a * (g1 - 1.0) * log_t);
    const double tr = s * s * (1.0 + c * c) + a * a;
    const double det = s * a;
    const double sig2 = 0.5 * (tr + std::sqrt(std::max(tr * tr - 4.0 * det * det, 0.0)));
    return std::max(e, 0.0) * log_t - std::log(a) / p + 0.5 * std::log(sig2);
  };
  constexpr int kGrid = 4000;
  constexpr double kLogMin = -700.0;
  int best = kGrid;
  double best_val = log_ratio(0.0);
  for (int i = 0; i < kGrid; ++i) {
    const double v = log_ratio(kLogMin * (1.0 - double(i) / kGrid));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best < kGrid) {
    const double step = -kLogMin / kGrid;
    const double lt = kLogMin * (1.0 - double(best) / kGrid);
    const auto neg = [&](double x) { return -log_ratio(x); };
    const auto [x, v] = boost::math::tools::brent_find_minima(neg, std::max(kLogMin, lt - step),
                                                              std::min(0.0, lt + step), 50);
    best_val = std::max(best_val, -v);
    (void)x;
  }
  return std::exp(best_val);
}

TransferReport capacity_transfer_check(const CuspProfile& profile, double a, double p,
                                       const CondenserSpec& cond, double h, int grading_levels,
                                       double mesh_tol) {
  if (profile.dimension() != 2) throw InvalidInput("capacity_transfer_check: planar profiles only");
  if (!(a > 0.0)) throw InvalidInput("capacity_transfer_check: need a > 0");
  TransferReport rep;
  rep.a = a;
  rep.p = p;
  rep.h = h;
  rep.mesh_tol = mesh_tol;
  rep.k = transfer_distortion(profile, a, p);
  if (!std::isfinite(rep.k)) {
    throw InvalidInput("capacity_transfer_check: distortion K is infinite for this a (need p(a-1) >= a gamma - 2)");
  }

  const double g1 = profile.gammas()[0];
  const TriMesh target = mesh_cusp_2d(g1, h, grading_levels);
  // Truncate the reference domain where the map sends it onto the target's truncation.
  const double y_min_ref = std::pow(target.grading.y_min, 1.0 / a);
  if (!(y_min_ref > 1e-200)) throw InvalidInput("capacity_transfer_check: reference truncation underflows");
  const TriMesh reference = mesh_cusp_2d(1.0, h, grading_levels, y_min_ref);

  Pins pulled(reference.vertices.size(), -1);
  for (std::size_t i = 0; i < pulled.size(); ++i) {
    const Point& x = reference.vertices[i];
    const Point y(x.x() * std::pow(x.y(), a * g1 - 1.0), std::pow(x.y(), a));
    const bool in0 = cond.plate0.contains(y);
    const bool in1 = cond.plate1.contains(y);
    if (in0 && in1) throw InvalidInput("condenser: plates share a mesh vertex");
    if (in0) pulled[i] = 0;
    if (in1) pulled[i] = 1;
  }

  rep.cap_original = capacity_p(target, cond, p).value;
  rep.cap_pullback = capacity_p(reference, pulled, p).value;
  rep.ratio = std::pow(rep.cap_pullback / rep.cap_original, 1.0 / p);
  rep.pass = rep.ratio <= rep.k * (1.0 + mesh_tol);
  return rep;
}

}  // namespace nb::fem
