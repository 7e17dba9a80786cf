#include "spinorloc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace spinorloc::quadrature {

Rule1D gauss_jacobi(int count, double alpha, double beta) {
  if (count < 1) throw std::invalid_argument("gauss_jacobi: count must be positive");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(count, count);
  const double ab = alpha + beta;
  for (int i = 0; i < count; ++i) {
    const double d = 2.0 * i + ab;
    double diag;
    if (i == 0) {
      diag = (beta - alpha) / (ab + 2.0);
    } else {
      diag = (beta * beta - alpha * alpha) / (d * (d + 2.0));
    }
    jac(i, i) = diag;
    if (i + 1 < count) {
      const double m = i + 1.0;
      const double dd = 2.0 * m + ab;
      double b = 4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (dd * dd * (dd + 1.0) * (dd - 1.0));
      if (m == 1.0 && std::fabs(ab + 1.0) < 1e-14) {
        b = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
      }
      jac(i, i + 1) = jac(i + 1, i) = std::sqrt(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  Rule1D rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

Rule1D gauss_legendre(int count, double a, double b) {
  Rule1D r = gauss_jacobi(count, 0.0, 0.0);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  for (int i = 0; i < count; ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ball_volume(int n) { return sphere_area(n) / n; }

SphereRule sphere_rule(int n, int degree) {
  if (n < 2) throw std::invalid_argument("sphere_rule: n must be >= 2");
  degree = std::max(degree, 0);
  SphereRule out;
  out.dim = n;
  out.degree = degree;
  if (n == 2) {
    const int m = degree + 1;
    out.nodes.resize(2, m);
    out.weights.assign(m, 2.0 * std::numbers::pi / m);
    for (int j = 0; j < m; ++j) {
      const double a = 2.0 * std::numbers::pi * (j + 0.5) / m;
      out.nodes(0, j) = std::cos(a);
      out.nodes(1, j) = std::sin(a);
    }
    return out;
  }
  const SphereRule sub = sphere_rule(n - 1, degree);
  const double a = 0.5 * (n - 3);
  const Rule1D t = gauss_jacobi(degree / 2 + 1, a, a);
  const int count = static_cast<int>(t.nodes.size()) * static_cast<int>(sub.weights.size());
  out.nodes.resize(n, count);
  out.weights.resize(count);
  int col = 0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t.nodes[i] * t.nodes[i]));
    for (std::size_t j = 0; j < sub.weights.size(); ++j) {
      out.nodes.col(col).head(n - 1) = s * sub.nodes.col(static_cast<Eigen::Index>(j));
      out.nodes(n - 1, col) = t.nodes[i];
      out.weights[col] = t.weights[i] * sub.weights[j];
      ++col;
    }
  }
  return out;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(int count) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    pts.emplace_back(r * std::cos(a), r * std::sin(a), z);
  }
  return pts;
}

}  // namespace spinorloc::quadrature
