// Gauss rules on intervals and product rules on spheres S^{n-1}.
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace spinorloc::quadrature {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `count` nodes on [a, b].
Rule1D gauss_legendre(int count, double a = -1.0, double b = 1.0);

/// Gauss-Jacobi rule on [-1, 1] for the weight (1-t)^alpha (1+t)^beta,
/// via Golub-Welsch.
Rule1D gauss_jacobi(int count, double alpha, double beta);

/// Quadrature on the unit sphere S^{n-1} in R^n, exact for polynomials of
/// total degree <= `degree`. Columns of `nodes` are unit vectors; weights sum
/// to the area of S^{n-1}.
struct SphereRule {
  int dim = 0;
  Eigen::MatrixXd nodes;  // dim x count
  std::vector<double> weights;
  int degree = 0;
};

SphereRule sphere_rule(int n, int degree);

/// Area of S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Volume of the unit ball in R^n.
double ball_volume(int n);

/// Quasi-uniform spiral points on S^2 (golden-angle construction).
std::vector<Eigen::Vector3d> fibonacci_sphere(int count);

}  // namespace spinorloc::quadrature
