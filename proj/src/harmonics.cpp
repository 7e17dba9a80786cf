#include "spinorloc/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "spinorloc/specialfn.hpp"

namespace spinorloc::harmonics {

double kernel_normalization(int n) { return 1.0 / (std::pow(2.0, 0.5 * n - 1.0) * std::tgamma(0.5 * n)); }

void UltrasphericalSum::validate() const {
  if (k < 1) throw std::invalid_argument("UltrasphericalSum: degree must be >= 1");
  if (n < 2) throw std::invalid_argument("UltrasphericalSum: sphere dimension must be >= 2");
  for (const auto& t : terms) {
    if (t.p.ambient_dim() != n + 1) throw std::invalid_argument("UltrasphericalSum: point dimension mismatch");
  }
  if (std::fabs(norm - kernel_normalization(n)) > 1e-14 * kernel_normalization(n)) {
    throw std::invalid_argument("UltrasphericalSum: normalization does not match n");
  }
}

UltrasphericalSum synthesize(const helmholtz::BesselSum& s, int k, const sphere::Chart& chart) {
  s.validate();
  if (chart.dim() != s.n) throw std::invalid_argument("synthesize: chart dimension differs from the Bessel sum");
  if (!(k > s.R)) throw std::invalid_argument("synthesize: degree must exceed the center radius R");
  UltrasphericalSum Y;
  Y.n = s.n;
  Y.k = k;
  Y.norm = kernel_normalization(s.n);
  Y.charts.push_back(chart);
  for (const auto& t : s.terms) Y.terms.push_back({t.c, chart.to_sphere(t.x / k)});
  return Y;
}

Complex eval(const UltrasphericalSum& Y, const Eigen::VectorXd& p) {
  Complex acc = 0.0;
  for (const auto& t : Y.terms) {
    const double s = std::clamp(p.dot(t.p.vec()), -1.0, 1.0);
    acc += t.c * specialfn::gegenbauer_cnk(Y.n, Y.k, s);
  }
  return Y.norm * acc;
}

Complex eval(const UltrasphericalSum& Y, const sphere::SpherePoint& p) { return eval(Y, p.vec()); }

Eigen::VectorXcd eval_grad(const UltrasphericalSum& Y, const sphere::SpherePoint& p) {
  const auto dim = static_cast<Eigen::Index>(Y.n + 1);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim);
  for (const auto& t : Y.terms) {
    const double s = std::clamp(p.vec().dot(t.p.vec()), -1.0, 1.0);
    g += (Y.norm * t.c * specialfn::gegenbauer_cnk_deriv(Y.n, Y.k, s, 1)) * t.p.vec().cast<Complex>();
  }
  const Eigen::VectorXcd pc = p.vec().cast<Complex>();
  const Complex radial = pc.transpose() * g;
  return g - radial * pc;
}

Complex eval_pullback(const UltrasphericalSum& Y, const sphere::Chart& chart, const Eigen::VectorXd& x) {
  return eval(Y, chart.to_sphere(x / Y.k).vec());
}

double laplace_residual(const UltrasphericalSum& Y, int samples, double h, std::uint64_t seed) {
  if (Y.k < 1) throw std::invalid_argument("laplace_residual: degree must be >= 1");
  if (h <= 0.0) h = 0.01 / (Y.k + 1);
  return laplace_residual([&Y](const Eigen::VectorXd& p) { return eval(Y, p); }, Y.n, Y.energy(), samples, h,
                          seed);
}

double laplace_residual(const std::function<Complex(const Eigen::VectorXd&)>& f, int n, double energy,
                        int samples, double h, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("laplace_residual: need at least one sample");
  if (!(h > 0.0)) throw std::invalid_argument("laplace_residual: step must be positive");
  const int dim = n + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd v(dim);
    for (int d = 0; d < dim; ++d) v(d) = gauss(rng);
    const auto p = sphere::SpherePoint::normalized(v);
    const auto chart = sphere::Chart::random(p, seed + 1000003ULL * (i + 1));
    const Complex f0 = f(p.vec());
    Complex sum2 = 0.0;
    for (int d = 0; d < n; ++d) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      x(d) = h;
      sum2 += f(chart.to_sphere(x).vec()) + f(chart.to_sphere(-x).vec()) - 2.0 * f0;
    }
    // normal coordinates: metric is the identity and Christoffels vanish at
    // the center, so the flat stencil is the Laplace-Beltrami operator there
    const Complex lap = -sum2 / (h * h);
    worst = std::max(worst, std::abs(lap - energy * f0));
    scale = std::max(scale, std::abs(f0));
  }
  return scale > 0.0 ? worst / scale : worst;
}

namespace {

// centered stencils, second-order accurate, offsets -a..a in units of h
const std::vector<double>& stencil(int order) {
  static const std::vector<double> s0{1.0};
  static const std::vector<double> s1{-0.5, 0.0, 0.5};
  static const std::vector<double> s2{1.0, -2.0, 1.0};
  static const std::vector<double> s3{-0.5, 1.0, 0.0, -1.0, 0.5};
  switch (order) {
    case 0: return s0;
    case 1: return s1;
    case 2: return s2;
    default: return s3;
  }
}

// difference field sampled on the cube {-M..M}^n of step h
struct GridField {
  int n = 0;
  int M = 0;
  std::vector<Complex> v;
  int side() const { return 2 * M + 1; }
  std::size_t index(const std::vector<int>& idx) const {
    std::size_t off = 0;
    for (int d = n - 1; d >= 0; --d) off = off * side() + static_cast<std::size_t>(idx[d] + M);
    return off;
  }
};

template <class Fn>
void odometer(int n, int lo, int hi, Fn&& fn) {
  std::vector<int> idx(n, lo);
  while (true) {
    fn(idx);
    int d = 0;
    while (d < n && ++idx[d] > hi) {
      idx[d] = lo;
      ++d;
    }
    if (d == n) break;
  }
}

std::vector<double> discrepancy(const helmholtz::BesselSum& phi, const UltrasphericalSum& Y,
                                const sphere::Chart& chart, int m, double h) {
  const int n = phi.n;
  const int inner = static_cast<int>(std::floor(1.0 / h + 1e-9));
  const int margin = m >= 3 ? 2 : (m >= 1 ? 1 : 0);
  GridField g;
  g.n = n;
  g.M = inner + margin;
  g.v.resize(static_cast<std::size_t>(std::pow(g.side(), n)));
  odometer(n, -g.M, g.M, [&](const std::vector<int>& idx) {
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d) x(d) = h * idx[d];
    // only points reachable from a stencil centered in the ball are needed
    if (x.norm() > 1.0 + margin * h * std::sqrt(static_cast<double>(n)) + 1e-12) return;
    g.v[g.index(idx)] = helmholtz::eval_bessel_sum(phi, x) - eval_pullback(Y, chart, x);
  });

  std::vector<double> sup(m + 1, 0.0);
  // multi-indices of each total order
  std::vector<std::vector<std::vector<int>>> alphas(m + 1);
  odometer(n, 0, m, [&](const std::vector<int>& a) {
    int total = 0;
    for (int x : a) total += x;
    if (total <= m) alphas[total].push_back(a);
  });
  odometer(n, -inner, inner, [&](const std::vector<int>& idx) {
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += (h * idx[d]) * (h * idx[d]);
    if (r2 > 1.0 + 1e-12) return;
    for (int j = 0; j <= m; ++j) {
      for (const auto& a : alphas[j]) {
        // tensor-product stencil
        Complex acc = 0.0;
        std::vector<int> off(n, 0), lo(n), hi(n);
        for (int d = 0; d < n; ++d) {
          const int half = static_cast<int>(stencil(a[d]).size() / 2);
          lo[d] = -half;
          hi[d] = half;
          off[d] = -half;
        }
        while (true) {
          double w = 1.0;
          std::vector<int> at(n);
          for (int d = 0; d < n; ++d) {
            w *= stencil(a[d])[static_cast<std::size_t>(off[d] - lo[d])];
            at[d] = idx[d] + off[d];
          }
          if (w != 0.0) acc += w * g.v[g.index(at)];
          int d = 0;
          while (d < n && ++off[d] > hi[d]) {
            off[d] = lo[d];
            ++d;
          }
          if (d == n) break;
        }
        sup[j] = std::max(sup[j], std::abs(acc) / std::pow(h, j));
      }
    }
  });
  return sup;
}

}  // namespace

CmErrorReport localization_error(const helmholtz::BesselSum& phi, const UltrasphericalSum& Y, int m, double h,
                                 std::size_t chart_index) {
  if (m < 0 || m > 3) throw std::invalid_argument("localization_error: order must lie in 0..3");
  if (!(h > 0.0) || h > 0.5) throw std::invalid_argument("localization_error: step must lie in (0, 0.5]");
  if (chart_index >= Y.charts.size()) throw std::invalid_argument("localization_error: no such chart");
  if (phi.n != Y.n) throw std::invalid_argument("localization_error: dimension mismatch");
  const auto& chart = Y.charts[chart_index];

  CmErrorReport rep;
  rep.k = Y.k;
  rep.h = h;
  rep.sup_error = discrepancy(phi, Y, chart, m, h);
  if (m == 0) return rep;
  // halve until the derivative orders settle to within 10%
  for (int level = 0; level < 2; ++level) {
    const double hf = 0.5 * rep.h;
    auto finer = discrepancy(phi, Y, chart, m, hf);
    bool settled = true;
    for (int j = 1; j <= m; ++j) {
      if (std::fabs(finer[j] - rep.sup_error[j]) > 0.1 * finer[j]) settled = false;
    }
    rep.h = hf;
    rep.sup_error = std::move(finer);
    if (settled) break;
  }
  return rep;
}

UltrasphericalSum multi_synthesize(const std::vector<std::pair<helmholtz::BesselSum, sphere::Chart>>& pairs,
                                   int k) {
  if (pairs.empty()) throw std::invalid_argument("multi_synthesize: no inputs");
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const double d = sphere::geodesic_dist(pairs[a].second.base(), pairs[b].second.base());
      if (d < 1e-9) throw std::invalid_argument("multi_synthesize: coincident base points");
      if (d > std::numbers::pi - 1e-9) throw std::invalid_argument("multi_synthesize: antipodal base points");
    }
  }
  UltrasphericalSum Y = synthesize(pairs[0].first, k, pairs[0].second);
  for (std::size_t a = 1; a < pairs.size(); ++a) {
    auto part = synthesize(pairs[a].first, k, pairs[a].second);
    if (part.n != Y.n) throw std::invalid_argument("multi_synthesize: dimension mismatch");
    Y.terms.insert(Y.terms.end(), part.terms.begin(), part.terms.end());
    Y.charts.push_back(pairs[a].second);
  }
  return Y;
}

double decay_profile(int n, int k, double rho) {
  if (!(rho > 0.0) || !(rho < 0.5 * std::numbers::pi)) {
    throw std::invalid_argument("decay_profile: rho must lie in (0, pi/2)");
  }
  const int samples = std::max(2000, 40 * k);
  const double span = std::numbers::pi - 2.0 * rho;
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = rho + span * i / samples;
    best = std::max(best, std::fabs(specialfn::gegenbauer_cnk(n, k, std::cos(t))));
  }
  return best;
}

}  // namespace spinorloc::harmonics
