// Euclidean Helmholtz fields (Laplacian + 1) phi = 0 with Laplacian the sum of
// second partials: Herglotz densities, shifted-Bessel sums, Fourier-Bessel
// series on B_2 in R^3, and a finite-difference residual.
#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace spinorloc::helmholtz {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ScalarField = std::function<Complex(const Eigen::VectorXd&)>;

/// Density f on S^{n-1} carried by the nodes and weights of a sphere rule.
/// The Herglotz field is phi(x) = int f(xi) exp(i x.xi) dsigma(xi).
struct HerglotzDensity {
  int n = 3;
  Eigen::MatrixXd nodes;  // n x count, unit columns
  std::vector<double> weights;
  std::vector<Complex> values;
  int degree = 0;  // polynomial exactness of the rule, 0 when unknown

  std::size_t size() const { return weights.size(); }

  /// Samples `f` at the nodes of a product rule exact to `degree`.
  static HerglotzDensity sample(int n, const std::function<Complex(const Eigen::VectorXd&)>& f,
                                int degree);
  /// Checks |xi_i| = 1 to 1e-12 and matching array sizes.
  void validate() const;
};

/// Quadrature value of the Herglotz integral at x.
Complex eval_herglotz(const HerglotzDensity& f, const Eigen::VectorXd& x);

/// phi(x) = sum_j c_j J_{n/2-1}(|x - x_j|) / |x - x_j|^{n/2-1}.
struct BesselSum {
  struct Term {
    Complex c;
    Eigen::VectorXd x;
  };
  int n = 3;
  std::vector<Term> terms;
  double R = 0.0;  // every |x_j| <= R

  /// Throws std::invalid_argument on an empty sum, mismatched dimensions or
  /// a center outside B_R.
  void validate() const;
  /// Smallest R covering every center.
  double enclosing_radius() const;
};

Complex eval_bessel_sum(const BesselSum& s, const Eigen::VectorXd& x);
ComplexVector eval_bessel_sum_grad(const BesselSum& s, const Eigen::VectorXd& x);
/// Symmetric n x n complex Hessian.
Eigen::MatrixXcd eval_bessel_sum_hessian(const BesselSum& s, const Eigen::VectorXd& x);

/// Gradient and Hessian of the radial kernel K_n(|y|) at y, using
/// dK_n/dr = -r K_{n+2}.
Eigen::VectorXd bessel_kernel_grad(int n, const Eigen::VectorXd& y);
Eigen::MatrixXd bessel_kernel_hessian(int n, const Eigen::VectorXd& y);

/// Smooth radial cutoff: 1 for |s-1| < 1/4, 0 for |s-1| > 1/2, quintic
/// (C^2) transition in between.
double shell_bump(double s);

struct DiscretizeOptions {
  double target = 1e-2;      // delta'
  double cell = 2.0;         // cell edge; the grid sum is alias-free below 2*pi/2.5
  double initial_radius = 8.0;
  double radius_growth = 1.2;
  double max_radius = 0.0;   // 0: derived from the density's rule degree
  std::size_t max_terms = 400000;
  int radial_nodes = 160;    // Gauss nodes for the shell integral
};

struct DiscretizeResult {
  BesselSum sum;
  double achieved_error = 0.0;  // max |phi_bessel - phi_herglotz| on the check set
  double reported_bound = 0.0;  // empirical bound for the unit ball
  double tail_l1 = 0.0;         // grid estimate of int_{B_Rmax \ B_R} |g^|
  double cell = 0.0;
  std::size_t check_points = 0;
};

/// Raised when the target cannot be met within the radius/term budget.
class DiscretizationError : public std::runtime_error {
 public:
  DiscretizationError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Bump-extends f to g on the shell 1/2 <= |xi| <= 3/2, computes its Fourier
/// transform by direct shell quadrature, and samples it at cell centers of
/// B_R with c_j = (2 pi)^{n/2} g^(x_j) |U_j|. R grows until the error
/// against eval_herglotz on a check set in the unit ball is below the target.
DiscretizeResult herglotz_discretize(const HerglotzDensity& f, const DiscretizeOptions& opt = {});

/// Max over a sample grid in [lo, hi] of |Delta_h phi + phi| with the
/// (2n+1)-point stencil of step h. `samples_per_axis` grid points per axis.
double helmholtz_residual(const ScalarField& field, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi, double h, int samples_per_axis = 9);

// ---------------------------------------------------------------- R^3 only

/// Spherical Bessel function j_l(r).
double spherical_bessel_j(int l, double r);
/// Orthonormal complex spherical harmonic Y_l^m at the unit vector w
/// (Condon-Shortley phase).
Complex spherical_harmonic(int l, int m, const Eigen::Vector3d& w);

/// phi(x) = sum_{l <= L} sum_{|m| <= l} b_{lm} j_l(|x|) Y_l^m(x/|x|).
struct FourierBesselSeries {
  int L = 0;
  std::vector<std::vector<Complex>> coeffs;  // coeffs[l][m + l]
  std::vector<double> radial_mass;           // int_0^2 j_l^2 r^2 dr
  std::vector<bool> ill_conditioned;         // sqrt(mass) below threshold
  double l2_error = 0.0;                     // ||phi - phi_L||_{L^2(B_2)}, quadrature

  Complex coeff(int l, int m) const { return coeffs[l][m + l]; }
  double energy() const;
};

struct FourierBesselOptions {
  double conditioning_threshold = 1e-7;  // on sqrt(radial_mass)
  int extra_angular_degree = 10;
  int extra_radial_nodes = 30;
  bool estimate_error = true;
};

/// Projects samples of a Helmholtz field on B_2 onto the truncated series.
FourierBesselSeries fourier_bessel_truncate(const ScalarField& phi, int L,
                                            const FourierBesselOptions& opt = {});
Complex eval_fourier_bessel(const FourierBesselSeries& s, const Eigen::Vector3d& x);

}  // namespace spinorloc::helmholtz
