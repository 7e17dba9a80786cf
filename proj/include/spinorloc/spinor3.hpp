// Spinors on S^3 = unit quaternions, trivialized by constant sections (the
// Killing frame). X_1, X_2, X_3 are the left-invariant fields generated by
// right multiplication with i, j, k; they are orthonormal and satisfy
// [X_a, X_b] = 2 eps_abc X_c.
//
// With A = sum gamma_a X_a and gamma_1 gamma_2 gamma_3 = Id one gets
// A^2 = Delta - 2A, so D = A + 3/2 and Dslash = D - 1/2 obey
// Dslash^2 = Delta + 1. Constants have D-eigenvalue 3/2, and on components
// of degree k the spectrum of D is {3/2 + k, -(1/2 + k)}.
#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "spinorloc/harmonics.hpp"
#include "spinorloc/helmholtz.hpp"
#include "spinorloc/sphere.hpp"

namespace spinorloc::spinor3 {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Spinor = Eigen::Vector2cd;

struct CliffordRep3 {
  std::array<Mat2, 3> gamma;
  int orientation = 1;  // +1 when the candidate set was kept, -1 when flipped

  /// i times the Pauli matrices, oriented so gamma_1 gamma_2 gamma_3 = Id.
  static CliffordRep3 standard();
  /// Orients an arbitrary candidate set; throws unless it is a Clifford
  /// representation with anti-Hermitian generators.
  static CliffordRep3 oriented(const std::array<Mat2, 3>& candidate);

  /// gamma(v) = sum v_a gamma_a.
  Mat2 apply(const Eigen::Vector3d& v) const;
  /// Anticommutators -2 delta_ab Id and anti-Hermiticity, to 1e-14.
  void validate() const;
};

/// psi = sum_w M_w X_w (Y_1, Y_2)^T, X_w = X_{w_1} ... X_{w_m} with the last
/// letter applied first. Both components share the degree k; an empty
/// component is the zero function, and k = 0 components are constants.
struct SpinorField3 {
  struct Word {
    std::vector<int> letters;  // 0, 1, 2 for X_1, X_2, X_3
    Mat2 M;
  };
  std::array<harmonics::UltrasphericalSum, 2> comp;
  std::vector<Word> words;
  CliffordRep3 cliff = CliffordRep3::standard();

  int k() const { return comp[0].terms.empty() ? comp[1].k : comp[0].k; }
  std::size_t max_word_length() const;

  /// psi = (Y_1, Y_2).
  static SpinorField3 from_components(const harmonics::UltrasphericalSum& y1,
                                      const harmonics::UltrasphericalSum& y2,
                                      const CliffordRep3& cliff = CliffordRep3::standard());
  /// The constant section with values v in the Killing frame.
  static SpinorField3 constant(const Spinor& v, const CliffordRep3& cliff = CliffordRep3::standard());
};

/// X_w Y at the unit quaternion q (analytic, any word length).
Complex word_derivative(const harmonics::UltrasphericalSum& Y, const Eigen::Vector4d& q,
                        const std::vector<int>& word);

Spinor eval(const SpinorField3& psi, const Eigen::Vector4d& q);
/// Pullback x -> psi(chart.to_sphere(x / k)).
Spinor eval_pullback(const SpinorField3& psi, const sphere::Chart& chart, const Eigen::VectorXd& x);

/// Symbolic D psi.
SpinorField3 dirac_apply(const SpinorField3& psi);
/// (D psi)(p) = sum_a gamma_a X_a psi + (3/2) psi.
Spinor dirac_apply(const SpinorField3& psi, const sphere::SpherePoint& p);
/// Same with D computed by centered differences of step h along the
/// left-invariant flows, for cross-validation.
Spinor dirac_apply_fd(const SpinorField3& psi, const sphere::SpherePoint& p, double h = 1e-5);

/// psi = Dslash(Dslash psi~ + mu psi~) / (2 mu^2), mu = k + 1, which reduces
/// to (psi~ + Dslash psi~ / mu) / 2 on degree-k components. Rejects
/// components whose degree differs from k or that fail the Laplace check.
SpinorField3 dirac_project(const SpinorField3& psi_tilde, int k);

/// max over seeded random samples of |D psi - lambda psi| / max|psi|.
double dirac_residual(const SpinorField3& psi, double lambda, int samples, std::uint64_t seed = 1);

struct EuclideanDiracReport {
  double dirac = 0.0;      // max |D_0 phi - phi| on the grid
  double helmholtz = 0.0;  // max componentwise |Delta phi_a + phi_a|
};

/// D_0 = sum gamma_mu d_mu with the given Clifford matrices, evaluated by
/// centered differences of step h on a samples^3 grid of the box.
EuclideanDiracReport euclidean_dirac_check(const std::array<helmholtz::ScalarField, 2>& phi,
                                           const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, double h,
                                           int samples = 5, const CliffordRep3& cliff = CliffordRep3::standard());
EuclideanDiracReport euclidean_dirac_check(const std::array<helmholtz::BesselSum, 2>& phi,
                                           const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, double h,
                                           int samples = 5, const CliffordRep3& cliff = CliffordRep3::standard());

}  // namespace spinorloc::spinor3
