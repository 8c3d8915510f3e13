#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nbound/fem/mesh.hpp"

namespace nb::fem {

using ScalarField = Eigen::VectorXd;  // P1 nodal values, one per vertex
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Piecewise-linear space on a TriMesh with the geometric data every
/// functional needs: areas, basis gradients, and an edge-midpoint rule.
///
/// The midpoint rule is exact for quadratics, so its p = 2 value of
/// int |f - c|^2 coincides with the consistent mass matrix.
class P1Space {
 public:
  explicit P1Space(const TriMesh& mesh);

  const TriMesh& mesh() const noexcept { return *mesh_; }
  Eigen::Index dofs() const noexcept { return static_cast<Eigen::Index>(mesh_->vertices.size()); }
  std::size_t triangle_count() const noexcept { return areas_.size(); }

  SparseMatrix stiffness() const;
  SparseMatrix mass() const;
  double area() const noexcept { return total_area_; }

  Eigen::Vector2d gradient(std::size_t t, const ScalarField& f) const;

  /// sum_T |T| |grad f|^p.
  double gradient_energy(const ScalarField& f, double p) const;
  /// Derivative of gradient_energy with respect to the nodal values.
  ScalarField gradient_energy_derivative(const ScalarField& f, double p) const;
  /// Hessian of the energy with |g|^2 replaced by |g|^2 + eps2, always symmetric positive semidefinite.
  SparseMatrix gradient_energy_hessian(const ScalarField& f, double p, double eps2) const;

  /// Sample values at edge midpoints and their weights (sum = area).
  Eigen::VectorXd midpoint_values(const ScalarField& f) const;
  const Eigen::VectorXd& midpoint_weights() const noexcept { return edge_weights_; }
  /// Scatter a derivative with respect to midpoint values back to the vertices.
  ScalarField scatter_midpoints(const Eigen::VectorXd& d) const;

 private:
  const TriMesh* mesh_;
  std::vector<double> areas_;
  std::vector<std::array<Eigen::Vector2d, 3>> grads_;
  std::vector<std::array<int, 2>> edges_;
  Eigen::VectorXd edge_weights_;
  double total_area_ = 0.0;
};

/// The unique c minimizing int |f - c|^p (midpoint rule), by safeguarded Newton
/// on the derivative, bracketed by [min f, max f].
double p_mean(const Eigen::VectorXd& samples, const Eigen::VectorXd& weights, double p);
double p_mean(const ScalarField& field, const TriMesh& mesh, double p);

}  // namespace nb::fem
