#include "nbound/fem/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/SparseCholesky>

#include "nbound/errors.hpp"
#include "nbound/parallel.hpp"

namespace nb::fem {

namespace {

// Removes the mass-weighted mean from each column.
void deflate_constants(const Eigen::VectorXd& mass_ones, double total, Eigen::MatrixXd& x) {
  const Eigen::RowVectorXd means = (mass_ones.transpose() * x) / total;
  x.rowwise() -= means;
}

double relative_residual(const SparseMatrix& k, const SparseMatrix& m, const Eigen::VectorXd& x,
                         double theta) {
  const Eigen::VectorXd mx = m * x;
  return (k * x - theta * mx).norm() / (std::abs(theta) * mx.norm());
}

void finish(const SparseMatrix& k, const SparseMatrix& m, const Eigen::VectorXd& mass_ones,
            double total, NeumannEigen& out) {
  Eigen::MatrixXd col = out.field;
  deflate_constants(mass_ones, total, col);
  Eigen::VectorXd f = col.col(0);
  f /= std::sqrt(f.dot(m * f));
  // Fix the sign so the largest-magnitude entry is positive.
  Eigen::Index idx = 0;
  f.cwiseAbs().maxCoeff(&idx);
  if (f[idx] < 0.0) f = -f;
  out.field = f;
  out.mean = mass_ones.dot(f) / total;
  out.residual = relative_residual(k, m, f, out.value);
}

NeumannEigen dense_eigen(const SparseMatrix& k, const SparseMatrix& m) {
  const Eigen::MatrixXd kd(k);
  const Eigen::MatrixXd md(m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kd, md);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("mu2_fem: dense generalized eigensolver failed", std::numeric_limits<double>::infinity());
  }
  NeumannEigen out;
  out.value = es.eigenvalues()[1];
  out.field = es.eigenvectors().col(1);
  out.dense = true;
  return out;
}

NeumannEigen subspace_eigen(const SparseMatrix& k, const SparseMatrix& m,
                            const Eigen::VectorXd& mass_ones, double total, const EigenOpts& opts) {
  const Eigen::Index n = k.rows();
  const double sigma = -1.0 / total;  // below the spectrum, scaled like 1 / area
  const SparseMatrix shifted = k - sigma * m;
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("mu2_fem: factorization of the shifted pencil failed", std::numeric_limits<double>::infinity());
  }

  const int b = std::clamp<int>(opts.block, 2, int(std::max<Eigen::Index>(2, n - 1)));
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd x(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = unif(rng);

  double residual = std::numeric_limits<double>::infinity();
  double last_theta = 0.0;
  int settled = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    deflate_constants(mass_ones, total, x);
    Eigen::MatrixXd y = solver.solve(m * x);
    deflate_constants(mass_ones, total, y);
    const Eigen::MatrixXd kr = y.transpose() * (k * y);
    const Eigen::MatrixXd mr = y.transpose() * (m * y);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> small(
        0.5 * (kr + kr.transpose()), 0.5 * (mr + mr.transpose()));
    if (small.info() != Eigen::Success) break;
    x = y * small.eigenvectors();
    const double theta = small.eigenvalues()[0];
    residual = relative_residual(k, m, x.col(0), theta);
    // Graded meshes floor the attainable residual; a settled Ritz value with a
    // small residual is accepted as converged.
    settled = std::abs(theta - last_theta) <= 1e-9 * theta ? settled + 1 : 0;
    last_theta = theta;
    if (residual < opts.tol || (settled >= 5 && residual < opts.stagnation_tol)) {
      NeumannEigen out;
      out.value = theta;
      out.field = x.col(0);
      return out;
    }
  }
  throw ConvergenceError("mu2_fem: subspace iteration did not converge", residual);
}

}  // namespace

NeumannEigen mu2_fem(const TriMesh& mesh, const EigenOpts& opts) {
  if (mesh.vertices.size() < 3 || mesh.triangles.empty()) throw InvalidInput("mu2_fem: empty mesh");
  const P1Space space(mesh);
  const SparseMatrix k = space.stiffness();
  const SparseMatrix m = space.mass();
  const Eigen::VectorXd mass_ones = m * Eigen::VectorXd::Ones(space.dofs());
  const double total = mass_ones.sum();

  NeumannEigen out = space.dofs() <= opts.dense_limit ? dense_eigen(k, m)
                                                      : subspace_eigen(k, m, mass_ones, total, opts);
  finish(k, m, mass_ones, total, out);
  return out;
}

double rayleigh_quotient(const P1Space& space, const ScalarField& f, double p) {
  const Eigen::VectorXd s = space.midpoint_values(f);
  const Eigen::VectorXd& w = space.midpoint_weights();
  const double c = p_mean(s, w, p);
  const double den = w.dot((s.array() - c).abs().pow(p).matrix());
  return space.gradient_energy(f, p) / den;
}

namespace {

struct Evaluation {
  double value = 0.0;
  double denominator = 0.0;
  double center = 0.0;
  ScalarField gradient;
};

Evaluation evaluate(const P1Space& space, const ScalarField& f, double p, bool with_gradient) {
  Evaluation ev;
  const Eigen::VectorXd s = space.midpoint_values(f);
  const Eigen::VectorXd& w = space.midpoint_weights();
  ev.center = p_mean(s, w, p);
  const Eigen::ArrayXd d = s.array() - ev.center;
  ev.denominator = (w.array() * d.abs().pow(p)).sum();
  const double num = space.gradient_energy(f, p);
  ev.value = num / ev.denominator;
  if (with_gradient) {
    // The derivative of the optimal centre drops out by its optimality condition.
    const Eigen::VectorXd dd = (w.array() * p * d.abs().pow(p - 2.0) * d).matrix();
    ev.gradient = (space.gradient_energy_derivative(f, p) -
                   ev.value * space.scatter_midpoints(dd)) / ev.denominator;
  }
  return ev;
}

// Shift by the p-mean and scale the denominator to one; the quotient is invariant.
void normalize(ScalarField& f, const Evaluation& ev, double p) {
  f.array() -= ev.center;
  f /= std::pow(ev.denominator, 1.0 / p);
}

struct Descent {
  double value = std::numeric_limits<double>::infinity();
  ScalarField field;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
};

Descent descend(const P1Space& space, const Eigen::SimplicialLDLT<SparseMatrix>& precond,
                ScalarField f, double p, const RayleighOpts& opts) {
  Descent out;
  Evaluation ev = evaluate(space, f, p, true);
  if (!std::isfinite(ev.value) || !(ev.denominator > 0.0)) {
    out.failed = true;
    return out;
  }
  normalize(f, ev, p);
  ev = evaluate(space, f, p, true);

  double alpha = 1.0;
  int quiet = 0;
  for (int it = 0; it < opts.iters; ++it) {
    out.iterations = it + 1;
    const ScalarField dir = -precond.solve(ev.gradient);
    const double slope = ev.gradient.dot(dir);
    if (!(slope < 0.0)) {
      out.converged = true;
      break;
    }
    // Stationarity in the preconditioner's dual norm.
    if (std::sqrt(-slope) <= 1e-9 * ev.value) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    alpha = std::min(2.0 * alpha, 1e6);
    Evaluation trial;
    ScalarField candidate;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      candidate = f + alpha * dir;
      trial = evaluate(space, candidate, p, false);
      if (std::isfinite(trial.value) && trial.denominator > 0.0 &&
          trial.value <= ev.value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No decrease available: converged to rounding, or genuinely stuck.
      if (std::sqrt(-slope) <= 1e-5 * ev.value) {
        out.converged = true;
      } else {
        out.failed = it == 0;
      }
      break;
    }
    const double previous = ev.value;
    normalize(candidate, trial, p);
    f = std::move(candidate);
    ev = evaluate(space, f, p, true);
    quiet = (previous - ev.value) <= opts.tol * ev.value ? quiet + 1 : 0;
    if (quiet >= 5) {
      out.converged = true;
      break;
    }
  }
  out.value = ev.value;
  out.field = std::move(f);
  return out;
}

// splitmix64 of (seed, restart index): distinct, reproducible streams per restart.
std::uint64_t restart_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ScalarField random_start(const Eigen::SimplicialLDLT<SparseMatrix>& precond, const SparseMatrix& m,
                         Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  ScalarField v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
  // Two smoothing sweeps keep the start away from mesh-scale oscillation.
  for (int s = 0; s < 2; ++s) v = precond.solve(m * v);
  return v;
}

}  // namespace

RayleighResult mup_rayleigh(const TriMesh& mesh, double p, const RayleighOpts& opts) {
  if (!(p > 1.0)) throw InvalidInput("mup_rayleigh: need p > 1");
  if (opts.restarts < 0 || opts.iters < 1) throw InvalidInput("mup_rayleigh: bad restart/iteration counts");
  const P1Space space(mesh);
  const SparseMatrix k = space.stiffness();
  const SparseMatrix m = space.mass();
  const SparseMatrix pre = k + (1.0 / space.area()) * m;
  Eigen::SimplicialLDLT<SparseMatrix> precond(pre);
  if (precond.info() != Eigen::Success) throw NumericalError("mup_rayleigh: preconditioner factorization failed");

  const ScalarField warm = mu2_fem(mesh).field;
  const std::size_t starts = std::size_t(opts.restarts) + 1;
  std::vector<Descent> runs(starts);
  parallel_for(starts, [&](std::size_t s) {
    ScalarField f0 = s == 0 ? warm : random_start(precond, m, space.dofs(), restart_seed(opts.seed, s));
    runs[s] = descend(space, precond, std::move(f0), p, opts);
  });

  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < starts; ++s) {
    if (runs[s].failed || !std::isfinite(runs[s].value)) continue;
    if (!best || runs[s].value < runs[*best].value) best = s;
  }
  if (!best) throw ConvergenceError("mup_rayleigh: every start failed to make line-search progress", std::numeric_limits<double>::infinity());

  RayleighResult res;
  res.value = runs[*best].value;
  res.field = std::move(runs[*best].field);
  res.best_start = int(*best);
  res.iterations = runs[*best].iterations;
  res.converged = runs[*best].converged;
  return res;
}

}  // namespace nb::fem
