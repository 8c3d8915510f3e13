#pragma once

#include <cstdint>

#include "nbound/fem/space.hpp"

namespace nb::fem {

struct NeumannEigen {
  double value = 0.0;    // first nonzero eigenvalue
  ScalarField field;     // M-normalized, mass-weighted mean removed
  double residual = 0.0; // |K x - value M x| / (value |M x|)
  double mean = 0.0;     // mass-weighted mean of the field (should vanish)
  bool dense = false;
};

struct EigenOpts {
  Eigen::Index dense_limit = 1000;  // vertex count up to which a dense solver is used
  int block = 6;
  int max_iter = 400;
  double tol = 1e-10;
  double stagnation_tol = 1e-6;
};

/// First nontrivial Neumann eigenpair of the P1 pencil (K, M).
NeumannEigen mu2_fem(const TriMesh& mesh, const EigenOpts& opts = {});

struct RayleighOpts {
  int restarts = 8;
  int iters = 400;
  std::uint64_t seed = 1;
  double tol = 1e-10;  // relative decrease below which an iterate counts as stationary
};

struct RayleighResult {
  double value = 0.0;  // best discrete Rayleigh quotient, an upper estimate of the P1 infimum
  ScalarField field;
  int best_start = 0;  // 0 = warm start from the p = 2 eigenfield, k >= 1 = random restart k
  int iterations = 0;
  bool converged = false;
  bool discretization = true;  // caveat: value is an approximation of the P1 infimum
};

/// Discrete Rayleigh quotient int |grad f|^p / min_c int |f - c|^p.
double rayleigh_quotient(const P1Space& space, const ScalarField& f, double p);

/// mu_p estimate by preconditioned descent of the Rayleigh quotient.
RayleighResult mup_rayleigh(const TriMesh& mesh, double p, const RayleighOpts& opts = {});

}  // namespace nb::fem
