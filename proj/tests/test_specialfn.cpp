#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "spinorloc/specialfn.hpp"

using namespace spinorloc::specialfn;
constexpr double kPi = std::numbers::pi;

namespace {

// Plain power series in double; adequate for the small arguments where it is
// used as an oracle.
double series_j(double nu, double t) {
  double term = std::pow(0.5 * t, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -0.25 * t * t / (m * (m + nu));
    sum += term;
  }
  return sum;
}

double bisect(double (*f)(double), double a, double b) {
  double fa = f(a);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Explicit finite sum:
//   P_k^{(a,b)}(t) = sum_s binom(k+a, k-s) binom(k+b, s) ((t-1)/2)^s ((t+1)/2)^{k-s}
long double jacobi_explicit(int k, double a, double b, double t) {
  auto binom = [](long double x, int m) {
    long double r = 1.0L;
    for (int i = 1; i <= m; ++i) r *= (x - m + i) / i;
    return r;
  };
  long double sum = 0.0L;
  for (int s = 0; s <= k; ++s) {
    sum += binom(k + a, k - s) * binom(k + b, s) * std::pow((t - 1.0L) / 2.0L, s) *
           std::pow((t + 1.0L) / 2.0L, k - s);
  }
  return sum;
}

}  // namespace

TEST_CASE("bessel_j closed forms for half-integer order") {
  CHECK(std::fabs(bessel_j(0.5, kPi)) < 1e-15);
  CHECK(bessel_j(0.5, kPi / 2) == doctest::Approx(2.0 / kPi).epsilon(1e-14));
  for (double t : {0.3, 2.0, 11.9, 12.1, 40.0, 250.0, 499.0}) {
    const double closed = std::sqrt(2.0 / (kPi * t)) * std::sin(t);
    CHECK(std::fabs(bessel_j(0.5, t) - closed) <= 1e-13 * std::sqrt(2.0 / (kPi * t)));
    const double closed15 = std::sqrt(2.0 / (kPi * t)) * (std::sin(t) / t - std::cos(t));
    CHECK(std::fabs(bessel_j(1.5, t) - closed15) <= 1e-13 * std::sqrt(2.0 / (kPi * t)));
  }
}

TEST_CASE("bessel_j first zero of J_1 from a bisection oracle") {
  const double zero = bisect([](double t) { return series_j(1.0, t); }, 3.0, 4.5);
  CHECK(zero == doctest::Approx(3.8317059702075123).epsilon(1e-14));
  CHECK(std::fabs(bessel_j(1.0, zero)) < 1e-14);
  CHECK(bessel_j(1.0, 1.0) == doctest::Approx(0.44005058574493352).epsilon(1e-14));
}

TEST_CASE("bessel_j agrees with an independent library up to t = 500") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> nu_d(0.0, 6.0), t_d(0.0, 500.0);
  for (int i = 0; i < 2000; ++i) {
    const double nu = i % 3 == 0 ? std::round(2 * nu_d(rng)) / 2 : nu_d(rng);
    const double t = i % 4 == 0 ? t_d(rng) / 40 : t_d(rng);
    const double ref = boost::math::cyl_bessel_j(nu, t);
    // relative to the local envelope, which is the meaningful scale near zeros
    const double env = std::max(std::fabs(ref), std::min(1.0, std::sqrt(2.0 / (kPi * std::max(t, 1e-3)))));
    CHECK(std::fabs(bessel_j(nu, t) - ref) <= 1e-12 * env);
  }
}

TEST_CASE("bessel_j rejects negative arguments") {
  CHECK_THROWS_AS(bessel_j(1.0, -0.1), std::domain_error);
}

TEST_CASE("bessel_kernel") {
  for (double r : {1e-9, 0.01, 0.7, 5.0, 13.0, 80.0}) {
    CHECK(bessel_kernel(3, r) == doctest::Approx(std::sqrt(2.0 / kPi) * std::sin(r) / r).epsilon(1e-13));
  }
  for (int n = 2; n <= 12; ++n) {
    const double lim = 1.0 / (std::pow(2.0, 0.5 * n - 1) * std::tgamma(0.5 * n));
    CHECK(bessel_kernel(n, 0.0) == doctest::Approx(lim).epsilon(1e-14));
    CHECK(bessel_kernel(n, 1e-7) == doctest::Approx(lim).epsilon(1e-10));
  }
  CHECK(bessel_kernel(4, 1.0) == doctest::Approx(series_j(1.0, 1.0)).epsilon(1e-14));
  // odd-dimension fast path against the generic order
  for (int n : {5, 7, 9}) {
    for (double r : {9.5, 12.5, 30.0}) {
      const double nu = 0.5 * n - 1;
      CHECK(bessel_kernel(n, r) == doctest::Approx(bessel_j(nu, r) / std::pow(r, nu)).epsilon(1e-11));
    }
  }
}

TEST_CASE("darboux_limit") {
  for (int n = 2; n <= 6; ++n) CHECK(darboux_limit(n, 0.0) == doctest::Approx(1.0 / std::tgamma(0.5 * n)));
  CHECK(std::fabs(darboux_limit(3, kPi)) < 1e-15);
  CHECK(darboux_limit(4, 1.0) == doctest::Approx(2.0 * 0.44005058574493352).epsilon(1e-14));
}

TEST_CASE("jacobi_p small cases and explicit-sum oracle") {
  for (double t : {-1.0, -0.3, 0.0, 0.8, 1.0}) {
    CHECK(jacobi_p({0, 0.3, 1.7}, t) == 1.0);
    CHECK(jacobi_p({1, 0.5, 0.5}, t) == doctest::Approx(1.5 * t));
  }
  CHECK(jacobi_p({10, 0.5, 0.5}, 0.3) == doctest::Approx(0.344869412351953133).epsilon(1e-13));
  CHECK(jacobi_p({10, 0.5, 0.5}, 0.3) ==
        doctest::Approx(static_cast<double>(jacobi_explicit(10, 0.5, 0.5, 0.3))).epsilon(1e-13));
  for (int k = 0; k <= 12; ++k) {
    for (double t : {-0.9, -0.2, 0.45, 0.99}) {
      const double ref = static_cast<double>(jacobi_explicit(k, 1.0, 2.5, t));
      CHECK(jacobi_p({k, 1.0, 2.5}, t) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
    }
  }
  bool flagged = false;
  jacobi_p_checked({3, 0.5, 0.5}, 1.0 + 1e-6, flagged);
  CHECK(flagged);
  jacobi_p_checked({3, 0.5, 0.5}, 0.5, flagged);
  CHECK_FALSE(flagged);
}

TEST_CASE("jacobi_p symmetry for alpha = beta") {
  for (int k = 0; k <= 60; ++k) {
    for (double t : {0.1, 0.37, 0.8, 0.999}) {
      const double a = jacobi_p({k, 1.5, 1.5}, t);
      const double b = jacobi_p({k, 1.5, 1.5}, -t);
      CHECK(std::fabs(b - (k % 2 ? -a : a)) <= 1e-12 * std::max(1.0, std::fabs(a)));
    }
  }
}

TEST_CASE("jacobi_p_deriv") {
  CHECK(jacobi_p_deriv({0, 0.5, 0.5}, 0.3) == 0.0);
  for (double t : {-0.7, 0.0, 0.6}) CHECK(jacobi_p_deriv({1, 0.5, 0.5}, t) == doctest::Approx(1.5));
  const double h = 1e-5;
  const double fd = (jacobi_p({8, 0.5, 0.5}, 0.2 + h) - jacobi_p({8, 0.5, 0.5}, 0.2 - h)) / (2 * h);
  CHECK(std::fabs(jacobi_p_deriv({8, 0.5, 0.5}, 0.2) - fd) < 1e-8);
  CHECK(jacobi_p_deriv({8, 0.5, 0.5}, 0.2) == doctest::Approx(-3.39557521874999994).epsilon(1e-13));
}

TEST_CASE("jacobi_p_deriv matches central differences at random samples") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> kd(1, 50), nd(2, 8);
  std::uniform_real_distribution<double> td(-0.95, 0.95);
  for (int i = 0; i < 100; ++i) {
    const int k = kd(rng);
    const double a = 0.5 * nd(rng) - 1.0;
    const double t = td(rng);
    const PolyIndex idx{k, a, a};
    const double h = 1e-6;
    const double fd = (jacobi_p(idx, t + h) - jacobi_p(idx, t - h)) / (2 * h);
    const double an = jacobi_p_deriv(idx, t);
    // relative to the polynomial scale, since derivatives cross zero
    const double scale = std::max(std::fabs(an), std::fabs(jacobi_p_deriv(idx, 1.0)) * 1e-3);
    CHECK(std::fabs(an - fd) <= 1e-6 * scale);
  }
}

TEST_CASE("higher derivatives chain consistently") {
  const PolyIndex idx{20, 0.5, 0.5};
  const double h = 1e-4;
  for (int m = 1; m <= 4; ++m) {
    const double t = 0.31;
    const double fd = (jacobi_p_deriv_m(idx, t + h, m - 1) - jacobi_p_deriv_m(idx, t - h, m - 1)) / (2 * h);
    const double an = jacobi_p_deriv_m(idx, t, m);
    CHECK(std::fabs(an - fd) <= 1e-6 * std::max(1.0, std::fabs(an)));
  }
}

TEST_CASE("gegenbauer normalization and low degrees") {
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k <= 500; ++k) worst = std::max(worst, std::fabs(gegenbauer_cnk(n, k, 1.0) - 1.0));
  CHECK(worst <= 1e-12);
  for (double t : {-0.8, 0.1, 0.9}) CHECK(gegenbauer_cnk(3, 1, t) == doctest::Approx(t));
  // n = 1: Chebyshev, T_k(cos th) = cos(k th)
  for (int k : {2, 17, 420}) CHECK(gegenbauer_cnk(1, k, std::cos(0.3)) == doctest::Approx(std::cos(k * 0.3)).epsilon(1e-11));
  // n = 3: C_k(cos th) = sin((k+1) th) / ((k+1) sin th)
  for (int k : {5, 40, 300}) {
    const double th = 0.37;
    CHECK(gegenbauer_cnk(3, k, std::cos(th)) ==
          doctest::Approx(std::sin((k + 1) * th) / ((k + 1) * std::sin(th))).epsilon(1e-11).scale(1.0 / k));
  }
}

TEST_CASE("gegenbauer approaches Gamma(n/2) times the Darboux limit") {
  const double ref = std::tgamma(1.5) * darboux_limit(3, 2.0);
  const double c40 = gegenbauer_cnk(3, 40, std::cos(2.0 / 40));
  const double c80 = gegenbauer_cnk(3, 80, std::cos(2.0 / 80));
  CHECK(std::fabs(c40 - ref) < 0.05);
  CHECK(std::fabs(c80 - ref) < 0.6 * std::fabs(c40 - ref));
}

TEST_CASE("Darboux rate e(2k)/e(k) in [0.3, 0.8]") {
  for (int n : {3, 4}) {
    for (double t : {0.5, 2.0, 5.0}) {
      auto err = [&](int k) {
        const double a = 0.5 * n - 1;
        return std::fabs(std::pow(k, -a) * jacobi_p(PolyIndex::ultraspherical(n, k), std::cos(t / k)) -
                         darboux_limit(n, t));
      };
      for (int k : {50, 100, 200}) {
        const double ratio = err(2 * k) / err(k);
        CHECK(ratio >= 0.3);
        CHECK(ratio <= 0.8);
      }
    }
  }
}

TEST_CASE("dimension counts") {
  CHECK(harmonic_space_dim(1, 3) == 4);
  for (int k = 0; k < 10; ++k) CHECK(harmonic_space_dim(k, 3) == (k + 1) * (k + 1));
  CHECK(harmonic_space_dim(3, 2) == 7);
  CHECK(spinor_rank(3) == 2);
  CHECK(dirac_eigenspace_dim(3, 0) == 2);
  CHECK(dirac_eigenspace_dim(3, 2) == 2 * 6);
}
