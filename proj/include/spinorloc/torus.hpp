// Rational directions on S^{n-1} and Laplace eigenfunctions on the flat torus
// T^n = R^n / Z^n, written in the basis e^{2 pi i m.x}, m in Z^n. A lattice
// point m with |m| = k gives the eigenvalue (2 pi k)^2.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spinorloc/helmholtz.hpp"

namespace spinorloc::torus {

using Complex = std::complex<double>;

struct LatticeDirectionSet {
  int n = 3;
  int k = 1;
  Eigen::MatrixXi m;  // n x count, integer points with |m|^2 = k^2

  std::size_t size() const { return static_cast<std::size_t>(m.cols()); }
  /// xi_j = m_j / k.
  Eigen::VectorXd direction(std::size_t j) const;
  /// Checks |m_j|^2 = k^2 in integer arithmetic and that no column repeats.
  void validate() const;
};

/// Every m in Z^n with |m|^2 = k^2, in lexicographic order. n in {2, 3, 4};
/// k <= 10^4 for n = 3 (10^6 for n = 2, 300 for n = 4).
LatticeDirectionSet lattice_directions(int n, int k);

/// Max over `trials` random caps {xi : xi.c >= cos theta} of |fraction of
/// the directions in the cap - normalized cap area|. Deterministic in seed.
double cap_discrepancy(const LatticeDirectionSet& s, int trials = 2000, std::uint64_t seed = 1);

/// Normalized area of the cap of angular radius theta on S^{n-1}, n in {2,3,4}.
double cap_fraction(int n, double theta);

/// u(x) = sum_j c_j e^{2 pi i m_j.x}.
struct TorusSum {
  int n = 3;
  int k = 1;
  std::vector<Eigen::VectorXi> m;
  std::vector<Complex> c;
};

Complex eval_torus_sum(const TorusSum& u, const Eigen::VectorXd& x);

/// Max over a sample grid of [0,1)^n of |Delta_h u + (2 pi k)^2 u| with the
/// (2n+1)-point stencil of step h.
double torus_eigen_residual(const TorusSum& u, double h, int samples_per_axis = 5);

struct LocalizeOptions {
  Eigen::VectorXd x0;             // base point on the torus, zero when empty
  double max_discrepancy = 1.0;   // reject sparser direction sets
  int discrepancy_trials = 2000;
  std::uint64_t seed = 1;
  int check_per_axis = 9;         // grid on [-1,1]^n, points inside B_1 used
};

struct LocalizeResult {
  TorusSum u;
  double discrepancy = 0.0;
  double max_angle = 0.0;   // largest angle from a density node to its lattice direction
  double error = 0.0;       // max over B_1 of |u(x0 + y/(2 pi k)) - phi(y)|
  double reference = 0.0;   // max over B_1 of |phi(y)|
};

class LocalizationError : public std::runtime_error {
 public:
  LocalizationError(const std::string& what, double discrepancy)
      : std::runtime_error(what), discrepancy_(discrepancy) {}
  double discrepancy() const { return discrepancy_; }

 private:
  double discrepancy_;
};

/// Moves the quadrature weight of every node of f to the nearest direction
/// of lattice_directions(n, k) and shifts the phase so that
/// u(x0 + y/(2 pi k)) approximates the Herglotz field of f at y.
LocalizeResult torus_localize(const helmholtz::HerglotzDensity& f, int k, const LocalizeOptions& opt = {});

}  // namespace spinorloc::torus
