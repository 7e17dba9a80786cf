#include "spinorloc/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spinorloc/quadrature.hpp"
#include "spinorloc/specialfn.hpp"

namespace spinorloc::helmholtz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// Odometer over the integer lattice {-m..m}^n.
template <class Fn>
void for_each_lattice_point(int n, int m, Fn&& fn) {
  std::vector<int> idx(n, -m);
  while (true) {
    fn(idx);
    int d = 0;
    while (d < n && ++idx[d] > m) {
      idx[d] = -m;
      ++d;
    }
    if (d == n) break;
  }
}

}  // namespace

// ------------------------------------------------------------------ Herglotz

HerglotzDensity HerglotzDensity::sample(int n, const std::function<Complex(const Eigen::VectorXd&)>& f,
                                        int degree) {
  const auto rule = quadrature::sphere_rule(n, degree);
  HerglotzDensity d;
  d.n = n;
  d.nodes = rule.nodes;
  d.weights = rule.weights;
  d.degree = degree;
  d.values.resize(rule.weights.size());
  for (Eigen::Index i = 0; i < rule.nodes.cols(); ++i) d.values[i] = f(rule.nodes.col(i));
  return d;
}

void HerglotzDensity::validate() const {
  if (nodes.rows() != n || static_cast<std::size_t>(nodes.cols()) != weights.size() ||
      weights.size() != values.size() || weights.empty()) {
    throw std::invalid_argument("HerglotzDensity: inconsistent sizes");
  }
  for (Eigen::Index i = 0; i < nodes.cols(); ++i) {
    if (std::fabs(nodes.col(i).norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("HerglotzDensity: node is not a unit vector");
    }
  }
}

Complex eval_herglotz(const HerglotzDensity& f, const Eigen::VectorXd& x) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < f.weights.size(); ++i) {
    const double ph = x.dot(f.nodes.col(static_cast<Eigen::Index>(i)));
    acc += f.weights[i] * f.values[i] * Complex(std::cos(ph), std::sin(ph));
  }
  return acc;
}

// ---------------------------------------------------------------- BesselSum

void BesselSum::validate() const {
  if (terms.empty()) throw std::invalid_argument("BesselSum: no terms");
  if (!std::isfinite(R)) throw std::invalid_argument("BesselSum: radius is not finite");
  for (const auto& t : terms) {
    if (t.x.size() != n) throw std::invalid_argument("BesselSum: center dimension mismatch");
    if (t.x.norm() > R * (1.0 + 1e-12) + 1e-12) {
      throw std::invalid_argument("BesselSum: center outside B_R");
    }
  }
}

double BesselSum::enclosing_radius() const {
  double r = 0.0;
  for (const auto& t : terms) r = std::max(r, t.x.norm());
  return r;
}

Complex eval_bessel_sum(const BesselSum& s, const Eigen::VectorXd& x) {
  Complex acc = 0.0;
  for (const auto& t : s.terms) acc += t.c * specialfn::bessel_kernel(s.n, (x - t.x).norm());
  return acc;
}

Eigen::VectorXd bessel_kernel_grad(int n, const Eigen::VectorXd& y) {
  return -specialfn::bessel_kernel(n + 2, y.norm()) * y;
}

Eigen::MatrixXd bessel_kernel_hessian(int n, const Eigen::VectorXd& y) {
  const double r = y.norm();
  const auto d = static_cast<Eigen::Index>(y.size());
  return -specialfn::bessel_kernel(n + 2, r) * Eigen::MatrixXd::Identity(d, d) +
         specialfn::bessel_kernel(n + 4, r) * (y * y.transpose());
}

ComplexVector eval_bessel_sum_grad(const BesselSum& s, const Eigen::VectorXd& x) {
  ComplexVector g = ComplexVector::Zero(s.n);
  for (const auto& t : s.terms) g += t.c * bessel_kernel_grad(s.n, x - t.x).cast<Complex>();
  return g;
}

Eigen::MatrixXcd eval_bessel_sum_hessian(const BesselSum& s, const Eigen::VectorXd& x) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(s.n, s.n);
  for (const auto& t : s.terms) h += t.c * bessel_kernel_hessian(s.n, x - t.x).cast<Complex>();
  return h;
}

// ------------------------------------------------------------- discretizing

double shell_bump(double s) {
  const double d = std::fabs(s - 1.0);
  if (d <= 0.25) return 1.0;
  if (d >= 0.5) return 0.0;
  const double t = (0.5 - d) / 0.25;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

namespace {

// F(a) = int chi(s) s^{n-1} exp(i s a) ds tabulated with its derivative for
// cubic Hermite interpolation.
class ShellTransform {
 public:
  ShellTransform(int n, double amax, int nodes_per_panel) : amax_(amax) {
    const double edges[4] = {0.5, 0.75, 1.25, 1.5};
    for (int p = 0; p < 3; ++p) {
      const auto r = quadrature::gauss_legendre(nodes_per_panel, edges[p], edges[p + 1]);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        s_.push_back(r.nodes[i]);
        w_.push_back(r.weights[i] * shell_bump(r.nodes[i]) * std::pow(r.nodes[i], n - 1));
      }
    }
    count_ = static_cast<int>(std::ceil(2.0 * amax_ / step_)) + 1;
    val_.resize(count_);
    der_.resize(count_);
    for (int i = 0; i < count_; ++i) {
      const double a = -amax_ + i * step_;
      Complex v = 0.0, dv = 0.0;
      for (std::size_t q = 0; q < s_.size(); ++q) {
        const Complex e = w_[q] * Complex(std::cos(s_[q] * a), std::sin(s_[q] * a));
        v += e;
        dv += kI * s_[q] * e;
      }
      val_[i] = v;
      der_[i] = dv;
    }
  }

  Complex operator()(double a) const {
    double u = (a + amax_) / step_;
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, count_ - 2);
    const double t = u - i;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * val_[i] + h10 * step_ * der_[i] + h01 * val_[i + 1] + h11 * step_ * der_[i + 1];
  }

 private:
  double amax_;
  double step_ = 0.01;
  int count_ = 0;
  std::vector<double> s_, w_;
  std::vector<Complex> val_, der_;
};

std::vector<Eigen::VectorXd> unit_ball_check_set(int n) {
  std::vector<Eigen::VectorXd> pts;
  const double step = 0.25;
  const int m = static_cast<int>(std::round(1.0 / step));
  for_each_lattice_point(n, m, [&](const std::vector<int>& idx) {
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d) x(d) = step * idx[d];
    if (x.norm() <= 1.0 + 1e-12) pts.push_back(x);
  });
  if (n == 3) {
    for (const auto& p : quadrature::fibonacci_sphere(64)) pts.emplace_back(Eigen::VectorXd(p));
  }
  return pts;
}

}  // namespace

DiscretizeResult herglotz_discretize(const HerglotzDensity& f, const DiscretizeOptions& opt) {
  f.validate();
  const int n = f.n;
  if (!(opt.cell > 0.0) || opt.cell >= 2.0 * kPi / 2.5) {
    throw std::invalid_argument("herglotz_discretize: cell size must lie in (0, 2 pi / 2.5)");
  }
  double rmax = opt.max_radius;
  if (rmax <= 0.0) rmax = f.degree > 0 ? (f.degree - 10) / 1.5 : 30.0;
  if (rmax < opt.initial_radius) {
    throw DiscretizationError("herglotz_discretize: density rule too coarse for the initial radius",
                              std::numeric_limits<double>::infinity());
  }
  const double h = opt.cell;
  const double cell_volume = std::pow(h, n);
  const ShellTransform shell(n, rmax + 1.0, std::max(8, opt.radial_nodes / 3));

  // cell centers of B_rmax sorted by radius
  struct Cell {
    Eigen::VectorXd x;
    double r;
  };
  std::vector<Cell> cells;
  const int m = static_cast<int>(std::floor(rmax / h));
  for_each_lattice_point(n, m, [&](const std::vector<int>& idx) {
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d) x(d) = h * idx[d];
    const double r = x.norm();
    if (r <= rmax) cells.push_back({std::move(x), r});
  });
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.r < b.r; });

  const auto check = unit_ball_check_set(n);
  std::vector<Complex> reference(check.size());
  for (std::size_t i = 0; i < check.size(); ++i) reference[i] = eval_herglotz(f, check[i]);
  std::vector<Complex> partial(check.size(), 0.0);

  const double gscale = std::pow(2.0 * kPi, -n);
  const double cscale = std::pow(2.0 * kPi, 0.5 * n) * cell_volume;

  DiscretizeResult res;
  res.cell = h;
  res.check_points = check.size();
  BesselSum& out = res.sum;
  out.n = n;

  double radius = opt.initial_radius;
  double shell_mass = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  while (true) {
    shell_mass = 0.0;
    for (; next < cells.size() && cells[next].r <= radius; ++next) {
      const auto& cell = cells[next];
      Complex ghat = 0.0;
      for (std::size_t i = 0; i < f.weights.size(); ++i) {
        ghat += f.weights[i] * f.values[i] * shell(cell.x.dot(f.nodes.col(static_cast<Eigen::Index>(i))));
      }
      ghat *= gscale;
      shell_mass += std::abs(ghat) * cell_volume;
      const Complex c = cscale * ghat;
      out.terms.push_back({c, cell.x});
      for (std::size_t i = 0; i < check.size(); ++i) {
        partial[i] += c * specialfn::bessel_kernel(n, (check[i] - cell.x).norm());
      }
    }
    double err = 0.0;
    for (std::size_t i = 0; i < check.size(); ++i) err = std::max(err, std::abs(partial[i] - reference[i]));
    best = std::min(best, err);
    out.R = radius;
    res.achieved_error = err;
    res.tail_l1 = shell_mass;
    if (err <= opt.target) break;
    if (out.terms.size() > opt.max_terms) {
      throw DiscretizationError("herglotz_discretize: term budget exhausted", best);
    }
    if (radius >= rmax) {
      throw DiscretizationError("herglotz_discretize: radius budget exhausted", best);
    }
    radius = std::min(rmax, radius * opt.radius_growth);
  }
  res.reported_bound = 1.3 * res.achieved_error + 1e-12;
  return res;
}

// ---------------------------------------------------------------- residual

double helmholtz_residual(const ScalarField& field, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          double h, int samples_per_axis) {
  const int n = static_cast<int>(lo.size());
  if (hi.size() != n || samples_per_axis < 1 || !(h > 0.0)) {
    throw std::invalid_argument("helmholtz_residual: bad box or step");
  }
  double worst = 0.0;
  std::vector<int> idx(n, 0);
  const int m = samples_per_axis;
  while (true) {
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d) {
      const double t = m == 1 ? 0.5 : static_cast<double>(idx[d]) / (m - 1);
      x(d) = lo(d) + t * (hi(d) - lo(d));
    }
    const Complex f0 = field(x);
    Complex lap = 0.0;
    for (int d = 0; d < n; ++d) {
      Eigen::VectorXd xp = x, xm = x;
      xp(d) += h;
      xm(d) -= h;
      lap += (field(xp) - 2.0 * f0 + field(xm)) / (h * h);
    }
    worst = std::max(worst, std::abs(lap + f0));
    int d = 0;
    while (d < n && ++idx[d] >= m) {
      idx[d] = 0;
      ++d;
    }
    if (d == n) break;
  }
  return worst;
}

// ------------------------------------------------------------ Fourier-Bessel

double spherical_bessel_j(int l, double r) {
  if (r == 0.0) return l == 0 ? 1.0 : 0.0;
  return std::sqrt(kPi / (2.0 * r)) * specialfn::bessel_j(l + 0.5, r);
}

namespace {

// Fully normalized associated Legendre values pbar[l][m], 0 <= m <= l <= L,
// such that Y_l^m = pbar[l][m] e^{i m phi}.
std::vector<std::vector<double>> normalized_legendre(int L, double x) {
  std::vector<std::vector<double>> p(L + 1);
  for (int l = 0; l <= L; ++l) p[l].assign(l + 1, 0.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 0; m <= L; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    p[m][m] = pmm;
    if (m + 1 <= L) p[m + 1][m] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= L; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
    }
  }
  return p;
}

// Y_l^m for all l <= L at w, stored at index l*l + (m + l).
std::vector<Complex> all_harmonics(int L, const Eigen::Vector3d& w) {
  const double z = std::clamp(w.z() / w.norm(), -1.0, 1.0);
  const double phi = std::atan2(w.y(), w.x());
  const auto p = normalized_legendre(L, z);
  std::vector<Complex> y((L + 1) * (L + 1));
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      const Complex v = p[l][m] * Complex(std::cos(m * phi), std::sin(m * phi));
      y[l * l + m + l] = v;
      if (m > 0) y[l * l - m + l] = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(v);
    }
  }
  return y;
}

}  // namespace

Complex spherical_harmonic(int l, int m, const Eigen::Vector3d& w) {
  if (l < 0 || std::abs(m) > l) throw std::invalid_argument("spherical_harmonic: bad (l, m)");
  return all_harmonics(l, w)[l * l + m + l];
}

double FourierBesselSeries::energy() const {
  double e = 0.0;
  for (const auto& row : coeffs)
    for (const auto& c : row) e += std::norm(c);
  return e;
}

Complex eval_fourier_bessel(const FourierBesselSeries& s, const Eigen::Vector3d& x) {
  const double r = x.norm();
  const Eigen::Vector3d w = r > 0.0 ? Eigen::Vector3d(x / r) : Eigen::Vector3d::UnitZ();
  const auto y = all_harmonics(s.L, w);
  Complex acc = 0.0;
  for (int l = 0; l <= s.L; ++l) {
    const double jl = spherical_bessel_j(l, r);
    if (jl == 0.0) continue;
    Complex part = 0.0;
    for (int m = -l; m <= l; ++m) part += s.coeffs[l][m + l] * y[l * l + m + l];
    acc += jl * part;
  }
  return acc;
}

FourierBesselSeries fourier_bessel_truncate(const ScalarField& phi, int L, const FourierBesselOptions& opt) {
  if (L < 0) throw std::invalid_argument("fourier_bessel_truncate: negative degree");
  const auto ang = quadrature::sphere_rule(3, 2 * L + opt.extra_angular_degree);
  const auto rad = quadrature::gauss_legendre(L + opt.extra_radial_nodes, 0.0, 2.0);
  const auto nodes = static_cast<std::size_t>(ang.nodes.cols());
  const int nh = (L + 1) * (L + 1);

  std::vector<std::vector<Complex>> ylm(nodes);
  for (std::size_t i = 0; i < nodes; ++i) ylm[i] = all_harmonics(L, ang.nodes.col(static_cast<Eigen::Index>(i)));

  FourierBesselSeries s;
  s.L = L;
  s.coeffs.assign(L + 1, {});
  for (int l = 0; l <= L; ++l) s.coeffs[l].assign(2 * l + 1, 0.0);
  s.radial_mass.assign(L + 1, 0.0);
  s.ill_conditioned.assign(L + 1, false);

  for (std::size_t q = 0; q < rad.nodes.size(); ++q) {
    const double r = rad.nodes[q];
    const double wr = rad.weights[q] * r * r;
    std::vector<Complex> a(nh, 0.0);
    for (std::size_t i = 0; i < nodes; ++i) {
      const Complex v = phi(Eigen::VectorXd(r * ang.nodes.col(static_cast<Eigen::Index>(i))));
      const double w = ang.weights[i];
      for (int j = 0; j < nh; ++j) a[j] += w * v * std::conj(ylm[i][j]);
    }
    for (int l = 0; l <= L; ++l) {
      const double jl = spherical_bessel_j(l, r);
      s.radial_mass[l] += wr * jl * jl;
      for (int m = -l; m <= l; ++m) s.coeffs[l][m + l] += wr * jl * a[l * l + m + l];
    }
  }
  for (int l = 0; l <= L; ++l) {
    for (auto& c : s.coeffs[l]) c /= s.radial_mass[l];
    s.ill_conditioned[l] = std::sqrt(s.radial_mass[l]) < opt.conditioning_threshold;
  }

  if (opt.estimate_error) {
    const auto ang2 = quadrature::sphere_rule(3, 2 * L + opt.extra_angular_degree + 10);
    const auto rad2 = quadrature::gauss_legendre(L + opt.extra_radial_nodes + 10, 0.0, 2.0);
    double err2 = 0.0;
    for (std::size_t q = 0; q < rad2.nodes.size(); ++q) {
      const double r = rad2.nodes[q];
      for (Eigen::Index i = 0; i < ang2.nodes.cols(); ++i) {
        const Eigen::Vector3d x = r * ang2.nodes.col(i);
        const Complex d = phi(Eigen::VectorXd(x)) - eval_fourier_bessel(s, x);
        err2 += rad2.weights[q] * r * r * ang2.weights[static_cast<std::size_t>(i)] * std::norm(d);
      }
    }
    s.l2_error = std::sqrt(err2);
  }
  return s;
}

}  // namespace spinorloc::helmholtz
