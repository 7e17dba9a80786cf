#include "spinorloc/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spinorloc::specialfn {

namespace {

constexpr double kSeriesCutoff = 12.0;

// J_nu(t) / (t/2)^nu summed in extended precision. Cancellation for t < 12
// costs at most ~e^6 in relative terms, which long double absorbs.
long double bessel_series_reduced(double nu, double t) {
  const long double q = -0.25L * static_cast<long double>(t) * t;
  long double term = 1.0L / std::tgamma(static_cast<long double>(nu) + 1.0L);
  long double sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<long double>(m) * (m + nu));
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) && m > t) break;
  }
  return sum;
}

// Steed's method: CF1 for J'/J, CF2 for (p + iq), Wronskian normalization.
// Valid for t >= 2; used only above kSeriesCutoff.
double bessel_steed(double nu, double x) {
  constexpr int kMaxIt = 100000;
  constexpr double kEps = 1e-17;
  constexpr double kTiny = 1e-300;
  const int nl = std::max(0, static_cast<int>(nu - x + 1.5));
  const double mu = nu - nl;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / std::numbers::pi;

  int isign = 1;
  double h = std::max(nu * xi, kTiny);
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int it = 0;
  for (; it < kMaxIt; ++it) {
    b += xi2;
    d = b - d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b - 1.0 / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  if (it == kMaxIt) throw std::runtime_error("bessel_j: CF1 did not converge");

  double rjl = isign * 1e-30;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double tmp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * tmp - rjl;
    rjl = tmp;
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double a = 0.25 - mu * mu;
  double p = -0.5 * xi;
  double q = 1.0;
  const double br = 2.0 * x;
  double bi = 2.0;
  fact = a * xi / (p * p + q * q);
  double cr = br + q * fact;
  double ci = bi + p * fact;
  double den = br * br + bi * bi;
  double dr = br / den;
  double di = -bi / den;
  double dlr = cr * dr - ci * di;
  double dli = cr * di + ci * dr;
  double tmp = p * dlr - q * dli;
  q = p * dli + q * dlr;
  p = tmp;
  for (int i = 1; i < kMaxIt; ++i) {
    a += 2 * i;
    bi += 2.0;
    dr = a * dr + br;
    di = a * di + bi;
    if (std::fabs(dr) + std::fabs(di) < kTiny) dr = kTiny;
    fact = a / (cr * cr + ci * ci);
    cr = br + cr * fact;
    ci = bi - ci * fact;
    if (std::fabs(cr) + std::fabs(ci) < kTiny) cr = kTiny;
    den = dr * dr + di * di;
    dr /= den;
    di /= -den;
    dlr = cr * dr - ci * di;
    dli = cr * di + ci * dr;
    tmp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = tmp;
    if (std::fabs(dlr - 1.0) + std::fabs(dli) < kEps) break;
  }
  const double gam = (p - f) / q;
  double rjmu = std::sqrt(w / ((p - f) * gam + q));
  rjmu = std::copysign(rjmu, rjl);
  return rjl1 * (rjmu / rjl);
}

// Hankel asymptotic expansion. Returns false when the terms stop shrinking
// before reaching double precision.
bool bessel_hankel(double nu, double x, double& out) {
  const double mu = 4.0 * nu * nu;
  const double z8 = 8.0 * x;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int k = 1; k < 60; ++k) {
    const double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * z8);
    term *= f;
    if (std::fabs(term) > last) return false;
    last = std::fabs(term);
    // terms alternate between Q (odd k) and P (even k) with signs + - - + ...
    const int r = k % 4;
    if (r == 1) q += term;
    else if (r == 2) p -= term;
    else if (r == 3) q -= term;
    else p += term;
    if (last < 1e-17) {
      converged = true;
      break;
    }
  }
  if (!converged) return false;
  const double phi = (0.5 * nu + 0.25) * std::numbers::pi;
  const double c = std::cos(x) * std::cos(phi) + std::sin(x) * std::sin(phi);
  const double s = std::sin(x) * std::cos(phi) - std::cos(x) * std::sin(phi);
  out = std::sqrt(2.0 / (std::numbers::pi * x)) * (p * c - q * s);
  return true;
}

}  // namespace

PolyIndex PolyIndex::ultraspherical(int n, int k) {
  const double a = 0.5 * n - 1.0;
  return PolyIndex{k, a, a};
}

double bessel_j(double nu, double t) {
  if (t < 0.0 || std::isnan(t)) throw std::domain_error("bessel_j: negative argument");
  if (nu < 0.0) throw std::domain_error("bessel_j: negative order");
  if (t == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (t < kSeriesCutoff) {
    const long double pre = std::pow(0.5L * t, static_cast<long double>(nu));
    return static_cast<double>(pre * bessel_series_reduced(nu, t));
  }
  double v = 0.0;
  if (t > 25.0 + nu * nu && bessel_hankel(nu, t, v)) return v;
  return bessel_steed(nu, t);
}

double bessel_kernel(int n, double r) {
  if (n < 1) throw std::domain_error("bessel_kernel: dimension must be >= 1");
  if (r < 0.0) throw std::domain_error("bessel_kernel: negative radius");
  const double nu = 0.5 * n - 1.0;
  if (n == 3 && r > 0.0) return std::sqrt(2.0 / std::numbers::pi) * std::sin(r) / r;
  if (n % 2 == 1 && n > 3 && r >= std::max(2.0, static_cast<double>(n))) {
    // half-integer order: sqrt(2/pi) j_l(r) / r^l with l = (n-3)/2, upward
    // recurrence is stable for r > l
    const int l = (n - 3) / 2;
    double jm = std::sin(r) / r;
    double j = std::sin(r) / (r * r) - std::cos(r) / r;
    for (int i = 1; i < l; ++i) {
      const double next = (2.0 * i + 1.0) / r * j - jm;
      jm = j;
      j = next;
    }
    return std::sqrt(2.0 / std::numbers::pi) * j / std::pow(r, l);
  }
  if (r < kSeriesCutoff) {
    if (nu < 0.0) {
      // n = 1: J_{-1/2}(r) r^{1/2} = sqrt(2/pi) cos r
      return std::sqrt(2.0 / std::numbers::pi) * std::cos(r);
    }
    return static_cast<double>(std::pow(2.0L, -static_cast<long double>(nu)) *
                               bessel_series_reduced(nu, r));
  }
  if (nu < 0.0) return std::sqrt(2.0 / std::numbers::pi) * std::cos(r);
  return bessel_j(nu, r) / std::pow(r, nu);
}

double darboux_limit(int n, double t) {
  if (t < 0.0) throw std::domain_error("darboux_limit: negative argument");
  return std::pow(2.0, 0.5 * n - 1.0) * bessel_kernel(n, t);
}

double jacobi_p(const PolyIndex& idx, double t) {
  const int k = idx.degree;
  if (k < 0) throw std::domain_error("jacobi_p: negative degree");
  const double al = idx.alpha;
  const double be = idx.beta;
  if (k == 0) return 1.0;
  double pm1 = 1.0;
  double p = 0.5 * (al - be) + 0.5 * (al + be + 2.0) * t;
  const double ab2 = al * al - be * be;
  for (int m = 2; m <= k; ++m) {
    const double a = 2.0 * m + al + be;
    const double c1 = 2.0 * m * (m + al + be) * (a - 2.0);
    const double c2 = (a - 1.0) * (a * (a - 2.0) * t + ab2);
    const double c3 = 2.0 * (m + al - 1.0) * (m + be - 1.0) * a;
    const double next = (c2 * p - c3 * pm1) / c1;
    pm1 = p;
    p = next;
  }
  return p;
}

double jacobi_p_checked(const PolyIndex& idx, double t, bool& out_of_range) {
  out_of_range = std::fabs(t) > 1.0 + 1e-12;
  return jacobi_p(idx, t);
}

double jacobi_p_deriv_m(const PolyIndex& idx, double t, int m) {
  if (m < 0) throw std::domain_error("jacobi_p_deriv_m: negative order");
  if (m == 0) return jacobi_p(idx, t);
  if (idx.degree < m) return 0.0;
  double scale = 1.0;
  const double s = idx.degree + idx.alpha + idx.beta;
  for (int i = 1; i <= m; ++i) scale *= 0.5 * (s + i);
  return scale * jacobi_p(PolyIndex{idx.degree - m, idx.alpha + m, idx.beta + m}, t);
}

double jacobi_p_deriv(const PolyIndex& idx, double t) { return jacobi_p_deriv_m(idx, t, 1); }

double gegenbauer_norm(int n, int k) {
  const double h = 0.5 * n;
  return std::exp(std::lgamma(k + 1.0) + std::lgamma(h) - std::lgamma(k + h));
}

double gegenbauer_cnk(int n, int k, double t) {
  if (k < 0) throw std::domain_error("gegenbauer_cnk: negative degree");
  if (n < 1) return gegenbauer_norm(n, k) * jacobi_p(PolyIndex::ultraspherical(n, k), t);
  // recurrence for the normalized polynomial directly, so C(1) = 1 holds to
  // rounding instead of inheriting the lgamma error of the prefactor; n = 1
  // (lam = 0) is the Chebyshev recurrence
  const double lam = 0.5 * (n - 1);
  if (k == 0) return 1.0;
  double cm1 = 1.0;
  double c = t;
  for (int m = 1; m < k; ++m) {
    const double next = (2.0 * (m + lam) * t * c - m * cm1) / (m + 2.0 * lam);
    cm1 = c;
    c = next;
  }
  return c;
}

double gegenbauer_cnk_deriv(int n, int k, double t, int m) {
  return gegenbauer_norm(n, k) * jacobi_p_deriv_m(PolyIndex::ultraspherical(n, k), t, m);
}

std::array<double, 5> gegenbauer_cnk_jet(int n, int k, double t, int max_order) {
  std::array<double, 5> out{};
  const double norm = gegenbauer_norm(n, k);
  const auto idx = PolyIndex::ultraspherical(n, k);
  for (int m = 0; m <= std::min(max_order, 4); ++m) out[m] = norm * jacobi_p_deriv_m(idx, t, m);
  return out;
}

namespace {
long long binomial(long long a, long long b) {
  if (b < 0 || a < 0 || b > a) return 0;
  b = std::min(b, a - b);
  long long r = 1;
  for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}
}  // namespace

long long harmonic_space_dim(int k, int n) {
  if (k < 0 || n < 1) return 0;
  return binomial(n + k, n) - binomial(n + k - 2, n);
}

int spinor_rank(int n) { return 1 << (n / 2); }

long long dirac_eigenspace_dim(int n, int k) {
  return spinor_rank(n) * binomial(n + k - 1, k);
}

}  // namespace spinorloc::specialfn
