#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spinorloc/spinor3.hpp"

using namespace spinorloc;
using namespace spinorloc::spinor3;

namespace {

constexpr Complex kI{0.0, 1.0};

helmholtz::BesselSum random_sum(int terms, double R, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  helmholtz::BesselSum s;
  s.n = 3;
  s.R = R;
  while (static_cast<int>(s.terms.size()) < terms) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x(d) = R * u(rng);
    if (x.norm() > R) continue;
    s.terms.push_back({Complex(u(rng), u(rng)), x});
  }
  return s;
}

const sphere::Chart& base_chart() {
  static const auto c = sphere::Chart::left_invariant(sphere::SpherePoint(Eigen::Vector4d(1, 0, 0, 0)));
  return c;
}

SpinorField3 tilde_field(int k, std::uint64_t seed = 1) {
  const auto y1 = harmonics::synthesize(random_sum(5, 3.0, seed), k, base_chart());
  const auto y2 = harmonics::synthesize(random_sum(5, 3.0, seed + 1), k, base_chart());
  return SpinorField3::from_components(y1, y2);
}

Eigen::Vector4d random_q(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector4d v(g(rng), g(rng), g(rng), g(rng));
  return v / v.norm();
}

// f(q exp(t e_a))
Eigen::Vector4d flow(const Eigen::Vector4d& q, int a, double t) {
  return sphere::quat::mul(q, Eigen::Vector4d(std::cos(t), 0, 0, 0) + std::sin(t) * sphere::quat::imag_unit(a));
}

double max_diff(const SpinorField3& a, const SpinorField3& b, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto q = random_q(rng);
    worst = std::max(worst, (eval(a, q) - eval(b, q)).norm());
  }
  return worst;
}

}  // namespace

TEST_CASE("Clifford representation") {
  const auto c = CliffordRep3::standard();
  CHECK_NOTHROW(c.validate());
  CHECK(c.orientation == 1);
  CHECK((c.gamma[0] * c.gamma[1] * c.gamma[2] - Mat2::Identity()).norm() < 1e-15);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d u(g(rng), g(rng), g(rng)), v(g(rng), g(rng), g(rng));
    const Mat2 ac = c.apply(u) * c.apply(v) + c.apply(v) * c.apply(u);
    CHECK((ac + 2.0 * u.dot(v) * Mat2::Identity()).norm() < 1e-13);
  }
}

TEST_CASE("orientation is fixed by flipping a mis-oriented candidate") {
  auto c = CliffordRep3::standard();
  std::array<Mat2, 3> neg{-c.gamma[0], -c.gamma[1], -c.gamma[2]};
  const auto fixed = CliffordRep3::oriented(neg);
  CHECK(fixed.orientation == -1);
  CHECK((fixed.gamma[0] - c.gamma[0]).norm() == 0.0);
  std::array<Mat2, 3> bad{c.gamma[0], c.gamma[0], c.gamma[2]};
  CHECK_THROWS_AS(CliffordRep3::oriented(bad), std::invalid_argument);

  // with the wrong orientation the Weitzenbock identity fails
  auto psi = tilde_field(6);
  psi.cliff.gamma = neg;
  const auto d1 = dirac_apply(psi);
  const auto d2 = dirac_apply(d1);
  std::mt19937_64 rng(2);
  const auto q = random_q(rng);
  const Spinor lhs = eval(d2, q) - eval(d1, q) + 0.25 * eval(psi, q);
  const Spinor rhs = (6.0 * 8.0 + 1.0) * eval(psi, q);
  CHECK((lhs - rhs).norm() > 1e-3 * rhs.norm());
}

TEST_CASE("constant spinors are eigenfields with eigenvalue 3/2") {
  const Spinor v(Complex(1.0, 0.5), Complex(-0.3, 2.0));
  const auto c = SpinorField3::constant(v);
  const sphere::SpherePoint p(Eigen::Vector4d(0.5, 0.5, -0.5, 0.5));
  CHECK((dirac_apply(c, p) - 1.5 * v).norm() < 1e-14);
  CHECK((eval(c, p.vec()) - v).norm() < 1e-14);
  CHECK(dirac_residual(c, 1.5, 50) <= 1e-10);
  CHECK(dirac_residual(c, 2.5, 50) == doctest::Approx(1.0));
  const auto same = dirac_project(c, 0);
  CHECK(max_diff(same, c, 20, 3) < 1e-14);
}

TEST_CASE("word derivatives match flow finite differences") {
  const auto Y = harmonics::synthesize(random_sum(4, 2.0, 5), 12, base_chart());
  std::mt19937_64 rng(4);
  const double h = 1e-4;
  for (int i = 0; i < 5; ++i) {
    const auto q = random_q(rng);
    for (int a = 0; a < 3; ++a) {
      const Complex fd = (harmonics::eval(Y, Eigen::VectorXd(flow(q, a, h))) -
                          harmonics::eval(Y, Eigen::VectorXd(flow(q, a, -h)))) / (2 * h);
      CHECK(std::abs(word_derivative(Y, q, {a}) - fd) < 1e-6);
      for (int b = 0; b < 3; ++b) {
        // X_a X_b Y: differentiate X_b Y along the X_a flow
        const Complex fd2 = (word_derivative(Y, flow(q, a, h), {b}) - word_derivative(Y, flow(q, a, -h), {b})) / (2 * h);
        CHECK(std::abs(word_derivative(Y, q, {a, b}) - fd2) < 1e-5);
        const Complex fd3 =
            (word_derivative(Y, flow(q, 2, h), {a, b}) - word_derivative(Y, flow(q, 2, -h), {a, b})) / (2 * h);
        CHECK(std::abs(word_derivative(Y, q, {2, a, b}) - fd3) < 1e-4);
      }
    }
    // [X_1, X_2] = 2 X_3
    const Complex comm = word_derivative(Y, q, {0, 1}) - word_derivative(Y, q, {1, 0});
    CHECK(std::abs(comm - 2.0 * word_derivative(Y, q, {2})) < 1e-10);
    // sum X_a^2 = -Delta
    const Complex lap = word_derivative(Y, q, {0, 0}) + word_derivative(Y, q, {1, 1}) + word_derivative(Y, q, {2, 2});
    CHECK(std::abs(lap + Y.energy() * harmonics::eval(Y, Eigen::VectorXd(q))) < 1e-9);
  }
}

TEST_CASE("projection yields D-eigenfields") {
  for (int k : {10, 30}) {
    const auto pt = tilde_field(k, 7);
    const auto psi = dirac_project(pt, k);
    CHECK(psi.max_word_length() == 1);
    CHECK(dirac_residual(psi, 1.5 + k, 100) <= 1e-6);
    CHECK(dirac_residual(psi, 2.5 + k, 100) >= 0.5);
    // the other branch is -(k + 1/2)
    const auto d = dirac_apply(pt);
    SpinorField3 other = pt;
    other.words.clear();
    for (const auto& w : pt.words) other.words.push_back({w.letters, (0.5 + 0.25 / (k + 1)) * w.M});
    for (const auto& w : d.words) other.words.push_back({w.letters, (-0.5 / (k + 1)) * w.M});
    CHECK(dirac_residual(other, -(0.5 + k), 50) <= 1e-6);
    // idempotence
    CHECK(max_diff(dirac_project(psi, k), psi, 50, 9) <= 1e-9);
    // finite-difference cross validation
    const sphere::SpherePoint p(Eigen::Vector4d(0.1, 0.7, -0.1, 0.7).normalized());
    CHECK((dirac_apply(psi, p) - dirac_apply_fd(psi, p)).norm() <= 1e-6 * std::max(1.0, eval(psi, p.vec()).norm() * k));
  }
}

TEST_CASE("literal two-step formula equals the reduced projection") {
  const int k = 8;
  const double mu = k + 1.0;
  const auto pt = tilde_field(k, 11);
  auto dslash = [](const SpinorField3& f) {
    auto d = dirac_apply(f);
    for (const auto& w : f.words) d.words.push_back({w.letters, -0.5 * w.M});
    return d;
  };
  auto inner = dslash(pt);
  for (const auto& w : pt.words) inner.words.push_back({w.letters, mu * w.M});
  auto literal = dslash(inner);
  for (auto& w : literal.words) w.M /= 2.0 * mu * mu;
  CHECK(max_diff(literal, dirac_project(pt, k), 30, 12) < 1e-10);
}

TEST_CASE("Weitzenbock: Dslash^2 = Delta + 1") {
  for (int k : {10, 30}) {
    const auto pt = tilde_field(k, 13);
    const auto d1 = dirac_apply(pt);
    std::mt19937_64 rng(14);
    double worst = 0.0, scale = 0.0, worst_fd = 0.0;
    for (int i = 0; i < 30; ++i) {
      const auto q = random_q(rng);
      const Spinor v = eval(pt, q);
      // analytic first pass, finite-difference second pass
      const Spinor dd = dirac_apply_fd(d1, sphere::SpherePoint(Eigen::VectorXd(q)), 1e-5);
      const Spinor lhs_fd = dd - eval(d1, q) + 0.25 * v;
      const Spinor lhs = eval(dirac_apply(d1), q) - eval(d1, q) + 0.25 * v;
      const Spinor rhs = (k * (k + 2.0) + 1.0) * v;
      worst = std::max(worst, (lhs - rhs).norm());
      worst_fd = std::max(worst_fd, (lhs_fd - rhs).norm());
      scale = std::max(scale, v.norm());
    }
    CHECK(worst <= 1e-6 * scale);
    CHECK(worst_fd <= 1e-6 * scale * (k + 1) * (k + 1));
  }
}

TEST_CASE("components of the projected field are harmonics, O(h^2) residual") {
  const int k = 10;
  const auto psi = dirac_project(tilde_field(k, 15), k);
  for (int a = 0; a < 2; ++a) {
    auto comp = [&](const Eigen::VectorXd& q) { return eval(psi, Eigen::Vector4d(q))(a); };
    const double r1 = harmonics::laplace_residual(comp, 3, k * (k + 2.0), 8, 4e-3);
    const double r2 = harmonics::laplace_residual(comp, 3, k * (k + 2.0), 8, 2e-3);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
    CHECK(r1 < 2e-2);
  }
}

TEST_CASE("dirac_project rejects a degree mismatch") {
  CHECK_THROWS_AS(dirac_project(tilde_field(10), 11), std::invalid_argument);
}

TEST_CASE("projected pullback approaches (1 + D_0) phi / 2 at rate 1/k") {
  const auto s1 = random_sum(5, 2.0, 21), s2 = random_sum(5, 2.0, 22);
  const auto cliff = CliffordRep3::standard();
  auto target = [&](const Eigen::Vector3d& x) {
    const Spinor v(helmholtz::eval_bessel_sum(s1, x), helmholtz::eval_bessel_sum(s2, x));
    const Eigen::VectorXcd g1 = helmholtz::eval_bessel_sum_grad(s1, x), g2 = helmholtz::eval_bessel_sum_grad(s2, x);
    Spinor d0 = Spinor::Zero();
    for (int m = 0; m < 3; ++m) d0 += cliff.gamma[m] * Spinor(g1(m), g2(m));
    return Spinor(0.5 * (v + d0));
  };
  auto err = [&](int k) {
    const auto psi = dirac_project(SpinorField3::from_components(harmonics::synthesize(s1, k, base_chart()),
                                                                 harmonics::synthesize(s2, k, base_chart())),
                                   k);
    double worst = 0.0;
    for (double a = -1.0; a <= 1.0; a += 0.2)
      for (double b = -1.0; b <= 1.0; b += 0.5) {
        const Eigen::Vector3d x(a, b, 0.3 * a - 0.2 * b);
        if (x.norm() > 1.0) continue;
        worst = std::max(worst, (eval_pullback(psi, base_chart(), x) - target(x)).norm());
      }
    return worst;
  };
  const double e60 = err(60), e120 = err(120);
  CHECK(e120 / e60 >= 0.3);
  CHECK(e120 / e60 <= 0.8);
}

TEST_CASE("flat Dirac check") {
  const auto cliff = CliffordRep3::standard();
  const Eigen::Vector3d xi = Eigen::Vector3d(0.3, -0.5, 0.8).normalized();
  const Spinor v(Complex(1.0, 0.2), Complex(-0.4, 0.7));
  auto make = [&](double sign) {
    const Spinor u = (Mat2::Identity() + sign * kI * cliff.apply(xi)) * v;
    std::array<helmholtz::ScalarField, 2> f;
    for (int a = 0; a < 2; ++a) {
      const Complex ua = u(a);
      f[a] = [ua, xi](const Eigen::VectorXd& x) {
        const double ph = xi.dot(Eigen::Vector3d(x));
        return ua * Complex(std::cos(ph), std::sin(ph));
      };
    }
    return f;
  };
  const Eigen::Vector3d lo = Eigen::Vector3d::Constant(-1.0), hi = Eigen::Vector3d::Constant(1.0);
  const auto good = make(1.0);
  const auto r1 = euclidean_dirac_check(good, lo, hi, 0.02);
  const auto r2 = euclidean_dirac_check(good, lo, hi, 0.01);
  CHECK(r1.dirac < 1e-3);
  CHECK(r1.dirac / r2.dirac == doctest::Approx(4.0).epsilon(0.05));
  const auto bad = euclidean_dirac_check(make(-1.0), lo, hi, 0.01);
  CHECK(bad.dirac > 0.5);
  CHECK(bad.helmholtz < 1e-3);
  std::array<helmholtz::BesselSum, 2> zero;
  for (auto& z : zero) z.n = 3;
  const auto rz = euclidean_dirac_check(zero, lo, hi, 0.01);
  CHECK(rz.dirac == 0.0);
  CHECK(rz.helmholtz == 0.0);
}
