#include "spinorloc/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

namespace spinorloc::torus {

namespace {

constexpr double kPi = std::numbers::pi;

// floor(sqrt(v)) for v >= 0, exact
std::int64_t isqrt(std::int64_t v) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

int max_height(int n) {
  switch (n) {
    case 2: return 1000000;
    case 3: return 10000;
    case 4: return 300;
    default: return 0;
  }
}

Eigen::MatrixXd directions(const LatticeDirectionSet& s) {
  return s.m.cast<double>() / static_cast<double>(s.k);
}

}  // namespace

Eigen::VectorXd LatticeDirectionSet::direction(std::size_t j) const {
  return m.col(static_cast<Eigen::Index>(j)).cast<double>() / static_cast<double>(k);
}

void LatticeDirectionSet::validate() const {
  if (m.rows() != n) throw std::invalid_argument("lattice set: row count differs from n");
  const std::int64_t k2 = static_cast<std::int64_t>(k) * k;
  std::set<std::vector<int>> seen;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    std::int64_t s = 0;
    std::vector<int> key(n);
    for (int i = 0; i < n; ++i) {
      s += static_cast<std::int64_t>(m(i, j)) * m(i, j);
      key[i] = m(i, j);
    }
    if (s != k2) throw std::invalid_argument("lattice set: |m|^2 != k^2 in column " + std::to_string(j));
    if (!seen.insert(key).second) throw std::invalid_argument("lattice set: repeated column " + std::to_string(j));
  }
}

LatticeDirectionSet lattice_directions(int n, int k) {
  if (n < 2 || n > 4) throw std::invalid_argument("lattice_directions: n must be 2, 3 or 4");
  if (k < 1 || k > max_height(n)) throw std::invalid_argument("lattice_directions: height out of range");
  const std::int64_t k2 = static_cast<std::int64_t>(k) * k;
  std::vector<int> flat;
  // fix the leading n-1 coordinates, the last one is +-sqrt(rest) when exact
  std::vector<int> head(n - 1, 0);
  auto emit = [&](std::int64_t rest) {
    const std::int64_t r = isqrt(rest);
    if (r * r != rest) return;
    for (int sgn : {-1, 1}) {
      if (r == 0 && sgn > 0) break;
      flat.insert(flat.end(), head.begin(), head.end());
      flat.push_back(static_cast<int>(sgn * r));
    }
  };
  auto loop = [&](auto&& self, int depth, std::int64_t rest) -> void {
    if (depth == n - 1) {
      emit(rest);
      return;
    }
    const auto b = static_cast<int>(isqrt(rest));
    for (int a = -b; a <= b; ++a) {
      head[depth] = a;
      self(self, depth + 1, rest - static_cast<std::int64_t>(a) * a);
    }
  };
  loop(loop, 0, k2);
  LatticeDirectionSet s;
  s.n = n;
  s.k = k;
  s.m = Eigen::Map<Eigen::MatrixXi>(flat.data(), n, static_cast<Eigen::Index>(flat.size() / n));
  return s;
}

double cap_fraction(int n, double theta) {
  theta = std::clamp(theta, 0.0, kPi);
  switch (n) {
    case 2: return theta / kPi;
    case 3: return 0.5 * (1.0 - std::cos(theta));
    case 4: return (theta - std::sin(theta) * std::cos(theta)) / kPi;
    default: throw std::invalid_argument("cap_fraction: n must be 2, 3 or 4");
  }
}

double cap_discrepancy(const LatticeDirectionSet& s, int trials, std::uint64_t seed) {
  if (s.size() == 0) throw std::invalid_argument("cap_discrepancy: empty set");
  if (trials < 1) throw std::invalid_argument("cap_discrepancy: trials must be positive");
  const Eigen::MatrixXd d = directions(s);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> angle(0.0, kPi);
  const double count = static_cast<double>(s.size());
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd c(s.n);
    for (int i = 0; i < s.n; ++i) c(i) = gauss(rng);
    c.normalize();
    const double theta = angle(rng);
    const double ct = std::cos(theta);
    const Eigen::VectorXd dots = d.transpose() * c;
    const auto inside = (dots.array() >= ct).count();
    worst = std::max(worst, std::fabs(inside / count - cap_fraction(s.n, theta)));
  }
  return worst;
}

Complex eval_torus_sum(const TorusSum& u, const Eigen::VectorXd& x) {
  Complex acc = 0.0;
  for (std::size_t j = 0; j < u.m.size(); ++j) {
    // reduce the phase mod 1 before scaling by 2 pi
    double ph = u.m[j].cast<double>().dot(x);
    ph -= std::floor(ph);
    acc += u.c[j] * std::polar(1.0, 2.0 * kPi * ph);
  }
  return acc;
}

double torus_eigen_residual(const TorusSum& u, double h, int samples_per_axis) {
  if (h <= 0.0 || samples_per_axis < 1) throw std::invalid_argument("torus_eigen_residual: bad grid");
  const double lam = std::pow(2.0 * kPi * u.k, 2);
  const int n = u.n;
  double worst = 0.0;
  std::vector<int> idx(n, 0);
  while (true) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = (idx[i] + 0.5) / samples_per_axis;
    const Complex c0 = eval_torus_sum(u, x);
    Complex lap = 0.0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      lap += (eval_torus_sum(u, xp) + eval_torus_sum(u, xm) - 2.0 * c0) / (h * h);
    }
    worst = std::max(worst, std::abs(lap + lam * c0));
    int i = 0;
    while (i < n && ++idx[i] == samples_per_axis) idx[i++] = 0;
    if (i == n) break;
  }
  return worst;
}

LocalizeResult torus_localize(const helmholtz::HerglotzDensity& f, int k, const LocalizeOptions& opt) {
  f.validate();
  const int n = f.n;
  Eigen::VectorXd x0 = opt.x0.size() == 0 ? Eigen::VectorXd::Zero(n) : opt.x0;
  if (x0.size() != n) throw std::invalid_argument("torus_localize: base point dimension");
  const auto s = lattice_directions(n, k);
  if (s.size() == 0) throw LocalizationError("torus_localize: no lattice directions of this height", 1.0);
  LocalizeResult res;
  res.discrepancy = cap_discrepancy(s, opt.discrepancy_trials, opt.seed);
  if (res.discrepancy > opt.max_discrepancy) {
    throw LocalizationError("torus_localize: cap discrepancy " + std::to_string(res.discrepancy) +
                                " above " + std::to_string(opt.max_discrepancy),
                            res.discrepancy);
  }
  const Eigen::MatrixXd d = directions(s);
  std::vector<Complex> acc(s.size(), 0.0);
  std::vector<bool> used(s.size(), false);
  for (std::size_t q = 0; q < f.size(); ++q) {
    Eigen::Index j = 0;
    const double best = (d.transpose() * f.nodes.col(static_cast<Eigen::Index>(q))).maxCoeff(&j);
    res.max_angle = std::max(res.max_angle, std::acos(std::clamp(best, -1.0, 1.0)));
    acc[j] += f.weights[q] * f.values[q];
    used[j] = true;
  }
  res.u.n = n;
  res.u.k = k;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!used[j]) continue;
    const Eigen::VectorXi mj = s.m.col(static_cast<Eigen::Index>(j));
    double ph = mj.cast<double>().dot(x0);
    ph -= std::floor(ph);
    res.u.m.push_back(mj);
    res.u.c.push_back(acc[j] * std::polar(1.0, -2.0 * kPi * ph));
  }

  const int g = std::max(2, opt.check_per_axis);
  std::vector<int> idx(n, 0);
  while (true) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = -1.0 + 2.0 * idx[i] / (g - 1);
    if (y.norm() <= 1.0 + 1e-12) {
      const Complex phi = helmholtz::eval_herglotz(f, y);
      const Complex val = eval_torus_sum(res.u, x0 + y / (2.0 * kPi * k));
      res.error = std::max(res.error, std::abs(val - phi));
      res.reference = std::max(res.reference, std::abs(phi));
    }
    int i = 0;
    while (i < n && ++idx[i] == g) idx[i++] = 0;
    if (i == n) break;
  }
  return res;
}

}  // namespace spinorloc::torus
