#include "spinorloc/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace spinorloc::sphere {

SpherePoint::SpherePoint(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() < 2 || std::fabs(p_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("SpherePoint: vector is not of unit length");
  }
}

SpherePoint SpherePoint::normalized(const Eigen::VectorXd& v) {
  const double r = v.norm();
  if (!(r > 0.0)) throw std::invalid_argument("SpherePoint: zero vector");
  return SpherePoint(v / r);
}

SpherePoint SpherePoint::antipode() const {
  SpherePoint q;
  q.p_ = -p_;
  return q;
}

Chart::Chart(SpherePoint base, Eigen::MatrixXd frame) : base_(std::move(base)), frame_(std::move(frame)) {
  const auto n = base_.ambient_dim();
  if (frame_.rows() != n || frame_.cols() != n - 1) {
    throw std::invalid_argument("Chart: frame has wrong shape");
  }
  const Eigen::MatrixXd gram = frame_.transpose() * frame_;
  if ((gram - Eigen::MatrixXd::Identity(n - 1, n - 1)).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("Chart: frame is not orthonormal");
  }
  if ((frame_.transpose() * base_.vec()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("Chart: frame is not tangent at the base point");
  }
}

Chart Chart::random(const SpherePoint& base, std::uint64_t seed) {
  const int n = base.ambient_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd frame(n, n - 1);
  for (int col = 0; col < n - 1;) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    // two Gram-Schmidt passes
    for (int pass = 0; pass < 2; ++pass) {
      v -= v.dot(base.vec()) * base.vec();
      for (int j = 0; j < col; ++j) v -= v.dot(frame.col(j)) * frame.col(j);
    }
    const double r = v.norm();
    if (r < 1e-6) continue;
    frame.col(col++) = v / r;
  }
  Chart c(base, frame);
  c.seed_ = seed;
  return c;
}

Chart Chart::left_invariant(const SpherePoint& base) {
  if (base.ambient_dim() != 4) throw std::invalid_argument("left_invariant chart requires S^3");
  const Eigen::Vector4d q = base.vec();
  Eigen::MatrixXd frame(4, 3);
  for (int i = 0; i < 3; ++i) frame.col(i) = quat::mul(q, quat::imag_unit(i));
  return Chart(base, frame);
}

SpherePoint Chart::to_sphere(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw std::invalid_argument("to_sphere: dimension mismatch");
  const double r = x.norm();
  if (r >= std::numbers::pi) throw std::domain_error("to_sphere: |x| >= pi");
  if (r == 0.0) return base_;
  const Eigen::VectorXd dir = frame_ * (x / r);
  Eigen::VectorXd p = std::cos(r) * base_.vec() + std::sin(r) * dir;
  return SpherePoint::normalized(p);
}

Eigen::VectorXd Chart::to_chart(const SpherePoint& p) const {
  const double c = p.vec().dot(base_.vec());
  const Eigen::VectorXd tangential = p.vec() - c * base_.vec();
  const double s = tangential.norm();
  if (s < 1e-14 && c < 0.0) throw std::domain_error("to_chart: antipode of the chart center");
  const double r = std::atan2(s, c);
  const double scale = s > 1e-300 ? r / s : 1.0;
  return scale * (frame_.transpose() * tangential);
}

SpherePoint chart_to_sphere(const Chart& c, const Eigen::VectorXd& x) { return c.to_sphere(x); }
Eigen::VectorXd sphere_to_chart(const Chart& c, const SpherePoint& p) { return c.to_chart(p); }

double geodesic_dist(const SpherePoint& p, const SpherePoint& q) {
  return std::acos(std::clamp(p.vec().dot(q.vec()), -1.0, 1.0));
}

namespace quat {

Eigen::Vector4d mul(const Eigen::Vector4d& p, const Eigen::Vector4d& q) {
  return {p(0) * q(0) - p(1) * q(1) - p(2) * q(2) - p(3) * q(3),
          p(0) * q(1) + p(1) * q(0) + p(2) * q(3) - p(3) * q(2),
          p(0) * q(2) - p(1) * q(3) + p(2) * q(0) + p(3) * q(1),
          p(0) * q(3) + p(1) * q(2) - p(2) * q(1) + p(3) * q(0)};
}

Eigen::Vector4d imag_unit(int i) {
  Eigen::Vector4d e = Eigen::Vector4d::Zero();
  e(i + 1) = 1.0;
  return e;
}

}  // namespace quat

}  // namespace spinorloc::sphere
