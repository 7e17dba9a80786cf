// Round S^n in R^{n+1}: points, normal geodesic charts, distances.
#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace spinorloc::sphere {

/// Unit vector in R^{n+1}.
class SpherePoint {
 public:
  SpherePoint() = default;
  /// Throws std::invalid_argument unless | |p| - 1 | <= 1e-12.
  explicit SpherePoint(Eigen::VectorXd p);
  /// Normalizes a nonzero vector.
  static SpherePoint normalized(const Eigen::VectorXd& v);

  const Eigen::VectorXd& vec() const { return p_; }
  int ambient_dim() const { return static_cast<int>(p_.size()); }
  int sphere_dim() const { return ambient_dim() - 1; }
  SpherePoint antipode() const;

 private:
  Eigen::VectorXd p_;
};

/// Normal geodesic coordinates centered at `base` with an orthonormal
/// tangent frame (columns of `frame`, each orthogonal to `base`).
class Chart {
 public:
  Chart() = default;
  /// Validates orthonormality and tangency to 1e-12.
  Chart(SpherePoint base, Eigen::MatrixXd frame);

  /// Frame from Gram-Schmidt on a seeded pseudorandom basis.
  static Chart random(const SpherePoint& base, std::uint64_t seed);
  /// S^3 only: frame e_i = base * (i, j, k) (quaternion right multiplication),
  /// i.e. the left-invariant frame evaluated at `base`.
  static Chart left_invariant(const SpherePoint& base);

  const SpherePoint& base() const { return base_; }
  const Eigen::MatrixXd& frame() const { return frame_; }
  int dim() const { return static_cast<int>(frame_.cols()); }
  std::uint64_t seed() const { return seed_; }

  /// Exponential map; throws std::domain_error for |x| >= pi.
  SpherePoint to_sphere(const Eigen::VectorXd& x) const;
  /// Inverse of to_sphere; throws std::domain_error at the antipode of base.
  Eigen::VectorXd to_chart(const SpherePoint& p) const;

 private:
  SpherePoint base_;
  Eigen::MatrixXd frame_;
  std::uint64_t seed_ = 0;
};

SpherePoint chart_to_sphere(const Chart& c, const Eigen::VectorXd& x);
Eigen::VectorXd sphere_to_chart(const Chart& c, const SpherePoint& p);

/// arccos of the clamped inner product, in [0, pi].
double geodesic_dist(const SpherePoint& p, const SpherePoint& q);

/// Quaternions as R^4 vectors (a, b, c, d) = a + b i + c j + d k.
namespace quat {
Eigen::Vector4d mul(const Eigen::Vector4d& p, const Eigen::Vector4d& q);
/// Unit imaginary unit e_i for i in {0,1,2} -> i, j, k.
Eigen::Vector4d imag_unit(int i);
}  // namespace quat

}  // namespace spinorloc::sphere
