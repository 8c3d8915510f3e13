#include "nbound/cusp_map.hpp"

#include <cmath>
#include <limits>

#include "nbound/errors.hpp"

namespace nb {

const char* to_string(DistortionVariant v) noexcept {
  return v == DistortionVariant::corrected ? "corrected" : "paper-simplified";
}

CuspMap::CuspMap(double a, CuspProfile profile, double margin)
    : a_(a), profile_(std::move(profile)), margin_(margin) {
  if (!(a_ > 0.0) || !std::isfinite(a_)) throw InvalidInput("cusp map: a must be positive");
}

bool CuspMap::in_reference(const Eigen::VectorXd& x) const {
  const int n = dimension();
  if (x.size() != n) return false;
  const double xn = x[n - 1];
  if (!(xn > margin_ && xn < 1.0 - margin_)) return false;
  for (int i = 0; i < n - 1; ++i) {
    if (!(x[i] > margin_ * xn && x[i] < xn * (1.0 - margin_))) return false;
  }
  return true;
}

bool CuspMap::in_target(const Eigen::VectorXd& y) const {
  const int n = dimension();
  if (y.size() != n) return false;
  const double yn = y[n - 1];
  if (!(yn > 0.0 && yn < 1.0)) return false;
  for (int i = 0; i < n - 1; ++i) {
    const double w = std::pow(yn, profile_.gammas()[i]);
    if (!(y[i] > 0.0 && y[i] < w)) return false;
  }
  return true;
}

void CuspMap::require_reference(const Eigen::VectorXd& x) const {
  if (!in_reference(x)) throw InvalidInput("cusp map: point is not strictly inside H_1");
}

Eigen::VectorXd CuspMap::eval(const Eigen::VectorXd& x) const {
  require_reference(x);
  const int n = dimension();
  const double xn = x[n - 1];
  Eigen::VectorXd y(n);
  for (int i = 0; i < n - 1; ++i) {
    y[i] = (x[i] / xn) * std::pow(xn, a_ * profile_.gammas()[i]);
  }
  y[n - 1] = std::pow(xn, a_);
  return y;
}

Eigen::VectorXd CuspMap::inverse(const Eigen::VectorXd& y) const {
  const int n = dimension();
  if (y.size() != n || !(y[n - 1] > 0.0 && y[n - 1] < 1.0)) {
    throw InvalidInput("cusp map inverse: point is not inside H_g");
  }
  Eigen::VectorXd x(n);
  const double xn = std::pow(y[n - 1], 1.0 / a_);
  for (int i = 0; i < n - 1; ++i) {
    x[i] = y[i] * std::pow(xn, 1.0 - a_ * profile_.gammas()[i]);
  }
  x[n - 1] = xn;
  return x;
}

double CuspMap::jacobian_det(const Eigen::VectorXd& x) const {
  require_reference(x);
  const int n = dimension();
  return a_ * std::pow(x[n - 1], a_ * profile_.gamma_total() - n);
}

Eigen::MatrixXd CuspMap::jacobian_matrix(const Eigen::VectorXd& x) const {
  require_reference(x);
  const int n = dimension();
  const double xn = x[n - 1];
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i) {
    const double ag = a_ * profile_.gammas()[i];
    d(i, i) = std::pow(xn, ag - 1.0);
    d(i, n - 1) = (ag - 1.0) * x[i] * std::pow(xn, ag - 2.0);
  }
  d(n - 1, n - 1) = a_ * std::pow(xn, a_ - 1.0);
  return d;
}

Eigen::MatrixXd CuspMap::rescaled_jacobian(const Eigen::VectorXd& x) const {
  require_reference(x);
  const int n = dimension();
  const double xn = x[n - 1];
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i) {
    const double g = profile_.gammas()[i];
    const double s = std::pow(xn, a_ * (g - 1.0));
    m(i, i) = s;
    m(i, n - 1) = (a_ * g - 1.0) * (x[i] / xn) * s;
  }
  m(n - 1, n - 1) = a_;
  return m;
}

double distortion_radicand(double a, const CuspProfile& profile, DistortionVariant variant) {
  const int n = profile.dimension();
  const double simplified =
      a * a * (profile.gamma_square_sum() + 1.0) - 2.0 * a * profile.gamma_sum();
  return variant == DistortionVariant::corrected ? simplified + 2.0 * (n - 1) : simplified;
}

double CuspMap::distortion_bound(const Eigen::VectorXd& x, DistortionVariant variant) const {
  require_reference(x);
  const double rad = distortion_radicand(a_, profile_, variant);
  if (rad < 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(x[dimension() - 1], a_ - 1.0) * std::sqrt(rad);
}

namespace {

template <class Mat, class Vec>
double power_iteration(const Mat& g, Vec v, double rel_tol, int max_iter) {
  v.normalize();
  double lambda = v.dot(g * v);
  for (int it = 0; it < max_iter; ++it) {
    const Vec w = g * v;
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
    const double next = v.dot(g * v);
    const bool done = std::abs(next - lambda) <= rel_tol * next;
    lambda = next;
    if (done) break;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& m, double rel_tol, int max_iter) {
  using Small = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
  using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
  const auto start = [](Eigen::Index size, auto v) {
    // Away from every coordinate axis, so the dominant direction is never orthogonal.
    for (Eigen::Index i = 0; i < size; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
    return v;
  };
  if (m.rows() <= 3 && m.cols() <= 3) {
    const Small g = m.transpose() * m;
    if (g.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    return power_iteration(g, start(g.cols(), SmallVec(g.cols())), rel_tol, max_iter);
  }
  const Eigen::MatrixXd g = m.transpose() * m;
  if (g.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  return power_iteration(g, start(g.cols(), Eigen::VectorXd(g.cols())), rel_tol, max_iter);
}

}  // namespace nb
