#include "nbound/fem/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nbound/errors.hpp"

namespace nb::fem {

P1Space::P1Space(const TriMesh& mesh) : mesh_(&mesh) {
  const auto& v = mesh.vertices;
  const std::size_t nt = mesh.triangles.size();
  areas_.resize(nt);
  grads_.resize(nt);
  std::map<std::pair<int, int>, std::size_t> edge_index;
  std::vector<double> weights;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    if (!(area > 0.0)) throw InvalidInput("P1Space: triangle with non-positive area");
    areas_[t] = area;
    total_area_ += area;
    for (int k = 0; k < 3; ++k) {
      const Point& a = v[tri[(k + 1) % 3]];
      const Point& b = v[tri[(k + 2) % 3]];
      // Gradient of the hat function of vertex k: rotated opposite edge over 2|T|.
      grads_[t][k] = Eigen::Vector2d(a.y() - b.y(), b.x() - a.x()) / (2.0 * area);

      int i = tri[(k + 1) % 3];
      int j = tri[(k + 2) % 3];
      if (i > j) std::swap(i, j);
      auto [it, fresh] = edge_index.try_emplace({i, j}, edges_.size());
      if (fresh) {
        edges_.push_back({i, j});
        weights.push_back(0.0);
      }
      weights[it->second] += area / 3.0;
    }
  }
  edge_weights_ = Eigen::Map<Eigen::VectorXd>(weights.data(), Eigen::Index(weights.size()));
}

SparseMatrix P1Space::stiffness() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * areas_.size());
  for (std::size_t t = 0; t < areas_.size(); ++t) {
    const auto& tri = mesh_->triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j], areas_[t] * grads_[t][i].dot(grads_[t][j]));
  }
  SparseMatrix k(dofs(), dofs());
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

SparseMatrix P1Space::mass() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * areas_.size());
  for (std::size_t t = 0; t < areas_.size(); ++t) {
    const auto& tri = mesh_->triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j], areas_[t] * (i == j ? 2.0 : 1.0) / 12.0);
  }
  SparseMatrix m(dofs(), dofs());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::Vector2d P1Space::gradient(std::size_t t, const ScalarField& f) const {
  const auto& tri = mesh_->triangles[t];
  return f[tri[0]] * grads_[t][0] + f[tri[1]] * grads_[t][1] + f[tri[2]] * grads_[t][2];
}

double P1Space::gradient_energy(const ScalarField& f, double p) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < areas_.size(); ++t) {
    sum += areas_[t] * std::pow(gradient(t, f).squaredNorm(), 0.5 * p);
  }
  return sum;
}

ScalarField P1Space::gradient_energy_derivative(const ScalarField& f, double p) const {
  ScalarField d = ScalarField::Zero(dofs());
  for (std::size_t t = 0; t < areas_.size(); ++t) {
    const Eigen::Vector2d g = gradient(t, f);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) continue;
    const double s = areas_[t] * p * std::pow(g2, 0.5 * p - 1.0);
    const auto& tri = mesh_->triangles[t];
    for (int k = 0; k < 3; ++k) d[tri[k]] += s * g.dot(grads_[t][k]);
  }
  return d;
}

SparseMatrix P1Space::gradient_energy_hessian(const ScalarField& f, double p, double eps2) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * areas_.size());
  for (std::size_t t = 0; t < areas_.size(); ++t) {
    const Eigen::Vector2d g = gradient(t, f);
    const double g2 = g.squaredNorm() + eps2;
    // p |g|^{p-2} (I + (p-2) g g^T / |g|^2); for p < 2 the second term is bounded below by (p-1) I.
    const double s = areas_[t] * p * std::pow(g2, 0.5 * p - 1.0);
    const Eigen::Matrix2d h = s * (Eigen::Matrix2d::Identity() + (p - 2.0) * g * g.transpose() / g2);
    const auto& tri = mesh_->triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tri[i], tri[j], grads_[t][i].dot(h * grads_[t][j]));
  }
  SparseMatrix hess(dofs(), dofs());
  hess.setFromTriplets(trip.begin(), trip.end());
  return hess;
}

Eigen::VectorXd P1Space::midpoint_values(const ScalarField& f) const {
  Eigen::VectorXd s(Eigen::Index(edges_.size()));
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    s[Eigen::Index(e)] = 0.5 * (f[edges_[e][0]] + f[edges_[e][1]]);
  }
  return s;
}

ScalarField P1Space::scatter_midpoints(const Eigen::VectorXd& d) const {
  ScalarField out = ScalarField::Zero(dofs());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    out[edges_[e][0]] += 0.5 * d[Eigen::Index(e)];
    out[edges_[e][1]] += 0.5 * d[Eigen::Index(e)];
  }
  return out;
}

double p_mean(const Eigen::VectorXd& samples, const Eigen::VectorXd& weights, double p) {
  if (!(p > 1.0)) throw InvalidInput("p_mean: need p > 1");
  if (samples.size() != weights.size() || samples.size() == 0) {
    throw InvalidInput("p_mean: sample and weight sizes differ or are empty");
  }
  double lo = samples.minCoeff();
  double hi = samples.maxCoeff();
  if (lo == hi) return lo;
  if (p == 2.0) {
    const double c = weights.dot(samples) / weights.sum();
    return std::clamp(c, lo, hi);
  }

  // phi(c) = sum w |s - c|^{p-2} (s - c) decreases strictly in c.
  const auto phi = [&](double c, double& slope) {
    double v = 0.0;
    slope = 0.0;
    for (Eigen::Index i = 0; i < samples.size(); ++i) {
      const double d = samples[i] - c;
      const double ad = std::abs(d);
      if (ad == 0.0) {
        if (p < 2.0) slope = -std::numeric_limits<double>::infinity();
        continue;
      }
      const double w = weights[i] * std::pow(ad, p - 2.0);
      v += w * d;
      slope -= (p - 1.0) * w;
    }
    return v;
  };

  const double scale = std::max(std::abs(lo), std::abs(hi));
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double slope = 0.0;
    const double v = phi(c, slope);
    if (v == 0.0) return c;
    if (v > 0.0) lo = c; else hi = c;
    double next = c - v / slope;
    if (!std::isfinite(next) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - c) <= 4.0 * std::numeric_limits<double>::epsilon() * scale ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      return next;
    }
    c = next;
  }
  return c;
}

double p_mean(const ScalarField& field, const TriMesh& mesh, double p) {
  if (field.size() != Eigen::Index(mesh.vertices.size())) {
    throw InvalidInput("p_mean: field length differs from vertex count");
  }
  const P1Space space(mesh);
  return p_mean(space.midpoint_values(field), space.midpoint_weights(), p);
}

}  // namespace nb::fem
