// Bessel functions of the first kind, Jacobi and normalized ultraspherical
// polynomials, with the derivative families needed by the field evaluators.
#pragma once

#include <array>

namespace spinorloc::specialfn {

/// Degree and parameters of a Jacobi polynomial P_k^{(alpha, beta)}.
struct PolyIndex {
  int degree = 0;
  double alpha = 0.0;
  double beta = 0.0;

  /// Symmetric index alpha = beta = n/2 - 1 used for ultraspherical
  /// polynomials on S^n.
  static PolyIndex ultraspherical(int n, int k);
};

/// J_nu(t) for nu >= 0 and t >= 0. Throws std::domain_error for t < 0.
double bessel_j(double nu, double t);

/// J_{n/2-1}(r) / r^{n/2-1}, continuous at r = 0 where it equals
/// 1 / (2^{n/2-1} Gamma(n/2)). Any integer n >= 1 is accepted; the
/// gradient and Hessian of the kernel are expressed through the kernels of
/// dimension n+2, n+4, n+6.
double bessel_kernel(int n, double r);

/// 2^{n/2-1} * bessel_kernel(n, t): the limit of
/// k^{1-n/2} P_k^{(n/2-1,n/2-1)}(cos(t/k)) as k grows.
double darboux_limit(int n, double t);

/// P_k^{(alpha,beta)}(t) by forward three-term recurrence.
double jacobi_p(const PolyIndex& idx, double t);

/// Same as jacobi_p but reports whether t lies outside [-1, 1] (beyond a
/// 1e-12 slack) through `out_of_range`.
double jacobi_p_checked(const PolyIndex& idx, double t, bool& out_of_range);

/// d/dt P_k^{(alpha,beta)}(t).
double jacobi_p_deriv(const PolyIndex& idx, double t);

/// m-th derivative of P_k^{(alpha,beta)}:
///   Gamma(k+a+b+1+m) / (2^m Gamma(k+a+b+1)) * P_{k-m}^{(a+m,b+m)}(t).
double jacobi_p_deriv_m(const PolyIndex& idx, double t, int m);

/// Gamma(k+1) Gamma(n/2) / Gamma(k+n/2), evaluated through lgamma.
double gegenbauer_norm(int n, int k);

/// C^n_k(t) = gegenbauer_norm(n,k) * P_k^{(n/2-1,n/2-1)}(t); C^n_k(1) = 1.
double gegenbauer_cnk(int n, int k, double t);

/// m-th derivative of C^n_k at t.
double gegenbauer_cnk_deriv(int n, int k, double t, int m);

/// Up to four derivatives of C^n_k at t in one call: out[m] = C^{(m)}(t) for
/// m <= max_order, remaining entries zero.
std::array<double, 5> gegenbauer_cnk_jet(int n, int k, double t, int max_order);

/// Dimension of the space of degree-k spherical harmonics on S^n:
/// C(n+k, k) - C(n+k-2, k-2).
long long harmonic_space_dim(int k, int n);

/// Complex rank of the spinor bundle over S^n: 2^{floor(n/2)}.
int spinor_rank(int n);

/// Multiplicity of the Dirac eigenvalue +(n/2 + k) on S^n:
/// spinor_rank(n) * C(n+k-1, k).
long long dirac_eigenspace_dim(int n, int k);

}  // namespace spinorloc::specialfn
