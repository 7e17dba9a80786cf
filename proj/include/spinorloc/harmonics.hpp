// Degree-k spherical harmonics on S^n built as sums of zonal Gegenbauer
// kernels, their synthesis from Euclidean Bessel sums, and localization
// measurements in rescaled normal charts.
//
// Sign conventions: the Laplace-Beltrami operator is taken positive, so a
// degree-k harmonic has Delta Y = k (n + k - 1) Y; the Euclidean Laplacian is
// the plain sum of second partials (Helmholtz: Delta phi + phi = 0).
#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spinorloc/helmholtz.hpp"
#include "spinorloc/sphere.hpp"

namespace spinorloc::harmonics {

using Complex = std::complex<double>;

/// 1 / (2^{n/2-1} Gamma(n/2)), the value of the Bessel kernel at 0.
double kernel_normalization(int n);

/// Y(p) = sum_j c_j * norm * C^n_k(p . p_j) on S^n in R^{n+1}.
struct UltrasphericalSum {
  struct Term {
    Complex c;
    sphere::SpherePoint p;
  };
  int n = 3;
  int k = 1;
  std::vector<Term> terms;
  double norm = 0.0;
  // charts the terms were synthesized through, in input order; the rescaled
  // pullback x -> Y(chart.to_sphere(x / k)) is taken in these
  std::vector<sphere::Chart> charts;

  /// k >= 1, every p_j on S^n, norm consistent with n.
  void validate() const;
  /// Energy k (n + k - 1).
  double energy() const { return static_cast<double>(k) * (n + k - 1); }
};

/// Maps centers x_j to p_j = chart^{-1}(x_j / k). Rejects k <= R.
UltrasphericalSum synthesize(const helmholtz::BesselSum& s, int k, const sphere::Chart& chart);

/// Exact finite sum at a point of S^n.
Complex eval(const UltrasphericalSum& Y, const sphere::SpherePoint& p);
/// Same for an ambient vector assumed to be of unit length (no validation).
Complex eval(const UltrasphericalSum& Y, const Eigen::VectorXd& p);
/// Tangential gradient at p as an ambient R^{n+1} vector.
Eigen::VectorXcd eval_grad(const UltrasphericalSum& Y, const sphere::SpherePoint& p);

/// Rescaled pullback Y(chart.to_sphere(x / k)).
Complex eval_pullback(const UltrasphericalSum& Y, const sphere::Chart& chart, const Eigen::VectorXd& x);

/// max over seeded random samples of |Delta Y - k(n+k-1) Y| / max|Y|, the
/// Laplacian from the second-order stencil of step h in a normal chart at
/// each sample. h <= 0 picks 0.01 / (k + 1). Rejects k < 1.
double laplace_residual(const UltrasphericalSum& Y, int samples, double h = 0.0, std::uint64_t seed = 1);

/// Same residual for any scalar function on S^n (ambient unit vectors in),
/// against the given eigenvalue; normalized by the sampled max |f|.
double laplace_residual(const std::function<Complex(const Eigen::VectorXd&)>& f, int n, double energy,
                        int samples, double h, std::uint64_t seed = 1);

struct CmErrorReport {
  std::vector<double> sup_error;  // index = derivative order
  double h = 0.0;
  int k = 0;
};

/// Discrete C^j (j = 0..m, m <= 3) sup discrepancies between phi and the
/// rescaled pullback of Y through Y.charts[chart_index] on the unit ball.
/// Derivatives are centered differences of the difference field; h is the
/// starting step and is halved until orders change by less than 10%.
CmErrorReport localization_error(const helmholtz::BesselSum& phi, const UltrasphericalSum& Y, int m, double h,
                                 std::size_t chart_index = 0);

/// Sum of per-chart syntheses. Rejects coincident or antipodal base points
/// and k <= max R.
UltrasphericalSum multi_synthesize(const std::vector<std::pair<helmholtz::BesselSum, sphere::Chart>>& pairs,
                                   int k);

/// max |C^n_k(cos t)| over t in [rho, pi - rho], dense sampling.
double decay_profile(int n, int k, double rho);

}  // namespace spinorloc::harmonics
