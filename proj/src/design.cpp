#include "spinorloc/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spinorloc/specialfn.hpp"

namespace spinorloc::helmholtz {

namespace {

using Eigen::Vector3d;

std::vector<Vector3d> fibonacci_sphere(int m, double radius) {
  std::vector<Vector3d> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < m; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / m;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.emplace_back(radius * r * std::cos(golden * i), radius * r * std::sin(golden * i), radius * z);
  }
  return pts;
}

struct Frame {
  Vector3d x, t, n1, n2;
};

// Bishop frame along a closed sampled curve, with the holonomy spread
// evenly so the frame closes up
// frame, plus `winding` extra full turns of the normal pair
std::vector<Frame> closed_frame(const nodal::Polyline& p, int winding) {
  const std::size_t m = p.size();
  std::vector<Frame> fr(m);
  for (std::size_t i = 0; i < m; ++i) {
    fr[i].x = p[i];
    fr[i].t = (p[(i + 1) % m] - p[(i + m - 1) % m]).normalized();
  }
  Vector3d n = fr[0].t.unitOrthogonal();
  fr[0].n1 = n;
  for (std::size_t i = 1; i <= m; ++i) {
    const Vector3d& t = fr[i % m].t;
    n = (n - n.dot(t) * t).normalized();
    if (i < m) fr[i].n1 = n;
  }
  // n is now the transported copy of fr[0].n1
  const Vector3d& t0 = fr[0].t;
  const double theta = std::atan2(t0.dot(fr[0].n1.cross(n)), fr[0].n1.dot(n));
  for (std::size_t i = 0; i < m; ++i) {
    const double a = (2.0 * std::numbers::pi * winding - theta) * static_cast<double>(i) / m;
    const Vector3d b = fr[i].t.cross(fr[i].n1);
    fr[i].n1 = std::cos(a) * fr[i].n1 + std::sin(a) * b;
    fr[i].n2 = fr[i].t.cross(fr[i].n1);
  }
  return fr;
}

constexpr double kMaxTargetRadius = 3.0;

double kernel3(const Vector3d& y) { return specialfn::bessel_kernel(3, y.norm()); }

}  // namespace

nodal::Polyline resample_closed(const nodal::Polyline& c, int m) {
  if (c.size() < 3 || m < 3) throw std::invalid_argument("resample_closed: need three points");
  std::vector<double> s{0.0};
  for (std::size_t i = 0; i < c.size(); ++i) s.push_back(s.back() + (c[(i + 1) % c.size()] - c[i]).norm());
  const double L = s.back();
  nodal::Polyline out;
  std::size_t seg = 0;
  for (int j = 0; j < m; ++j) {
    const double target = L * j / m;
    while (seg + 1 < s.size() - 1 && s[seg + 1] <= target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double u = len > 0.0 ? (target - s[seg]) / len : 0.0;
    out.push_back(c[seg] + u * (c[(seg + 1) % c.size()] - c[seg]));
  }
  return out;
}

spinor3::Spinor dirac_limit(const std::array<BesselSum, 2>& phi, const Vector3d& x,
                            const spinor3::CliffordRep3& cliff) {
  spinor3::Spinor v, out;
  Eigen::Matrix<Complex, 3, 2> g = Eigen::Matrix<Complex, 3, 2>::Zero();
  for (int b = 0; b < 2; ++b) {
    v(b) = phi[b].terms.empty() ? Complex(0.0) : eval_bessel_sum(phi[b], x);
    if (!phi[b].terms.empty()) g.col(b) = eval_bessel_sum_grad(phi[b], x);
  }
  out = v;
  for (int m = 0; m < 3; ++m) out += cliff.gamma[m] * spinor3::Spinor(g(m, 0), g(m, 1));
  return 0.5 * out;
}

nodal::Field realized_field(const DesignResult& d, int component, const spinor3::CliffordRep3& cliff) {
  if (component < 0 || component > 1) throw std::invalid_argument("realized_field: component must be 0 or 1");
  if (d.mode == DesignMode::scalar) {
    const BesselSum s = d.fields[component];
    return [s](const Vector3d& x) { return eval_bessel_sum(s, x); };
  }
  const auto phi = d.fields;
  return [phi, component, cliff](const Vector3d& x) { return dirac_limit(phi, x, cliff)(component); };
}

int match_curve(const std::vector<nodal::NodalCurve>& curves, const nodal::Polyline& target, double* dist) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (!curves[i].closed) continue;
    const double d = nodal::hausdorff_dist(curves[i], target, true, 2e-3);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  if (dist) *dist = bd;
  return best;
}

std::vector<DesignTarget> hopf_targets(double radius, int samples) {
  if (!(radius > 0.0)) throw std::invalid_argument("hopf_targets: radius must be positive");
  const Vector3d e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
  return {{nodal::circle(Vector3d(-0.5 * radius, 0, 0), radius, e1, e2, samples), 0},
          {nodal::circle(Vector3d(0.5 * radius, 0, 0), radius, e1, -e3, samples), 1}};
}

DesignOptions hopf_design_options() {
  DesignOptions o;
  o.mode = DesignMode::dirac;
  o.gradient = GradientRule::conformal;
  o.winding_search = 2;
  o.regularization = 3e-4;
  o.center_radius = 6.0;
  o.verify_h = 0.1;
  o.tolerance = 0.12;
  return o;
}

namespace {

void check_targets(const std::vector<DesignTarget>& targets) {
  if (targets.empty()) throw std::invalid_argument("design_bessel_sum: no targets");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& t = targets[i];
    if (t.component < 0 || t.component > 1) throw std::invalid_argument("design_bessel_sum: component must be 0 or 1");
    if (t.curve.size() < 3) throw std::invalid_argument("design_bessel_sum: target curve needs three vertices");
    for (const auto& v : t.curve) {
      if (v.norm() > kMaxTargetRadius) throw std::invalid_argument("design_bessel_sum: target leaves the design ball");
    }
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (nodal::curve_distance(t.curve, true, targets[j].curve, true) < 1e-6) {
        throw std::invalid_argument("design_bessel_sum: target curves intersect");
      }
    }
  }
}

struct Solved {
  std::array<BesselSum, 2> fields;
  double residual = 0.0;
};

Solved solve_collocation(const std::vector<DesignTarget>& targets, int N, const DesignOptions& opt) {
  const auto centers = fibonacci_sphere(N, opt.center_radius);
  bool used[2] = {false, false};
  for (const auto& t : targets) used[t.component] = true;
  // N unknown coefficients per component that carries unknowns
  const bool coupled = opt.mode == DesignMode::dirac;
  std::array<int, 2> offset{-1, -1};
  int cols = 0;
  for (int b = 0; b < 2; ++b) {
    if (coupled || used[b]) {
      offset[b] = cols;
      cols += N;
    }
  }

  const Complex I(0.0, 1.0);
  std::vector<Eigen::VectorXcd> rows;
  std::vector<Complex> rhs;
  for (const auto& t : targets) {
    const auto frames = closed_frame(resample_closed(t.curve, opt.samples_per_curve), t.winding);
    Eigen::VectorXcd mean_row = Eigen::VectorXcd::Zero(cols);
    const int a = t.component;
    for (const auto& f : frames) {
      // value, derivative along n1, derivative along n2
      Eigen::VectorXcd r0 = Eigen::VectorXcd::Zero(cols), r1 = r0, r2 = r0;
      for (int j = 0; j < N; ++j) {
        const Vector3d y = f.x - centers[j];
        const double K = kernel3(y);
        const Vector3d g = bessel_kernel_grad(3, y);
        if (!coupled) {
          const int c = offset[a] + j;
          r0(c) = K;
          r1(c) = g.dot(f.n1);
          r2(c) = g.dot(f.n2);
          continue;
        }
        const Eigen::Matrix3d H = bessel_kernel_hessian(3, y);
        const Vector3d H1 = H * f.n1, H2 = H * f.n2;
        for (int b = 0; b < 2; ++b) {
          const int c = offset[b] + j;
          Complex v0 = a == b ? 0.5 * K : 0.0;
          Complex v1 = a == b ? 0.5 * g.dot(f.n1) : 0.0;
          Complex v2 = a == b ? 0.5 * g.dot(f.n2) : 0.0;
          for (int m = 0; m < 3; ++m) {
            const Complex gm = opt.cliff.gamma[m](a, b);
            v0 += 0.5 * gm * g(m);
            v1 += 0.5 * gm * H1(m);
            v2 += 0.5 * gm * H2(m);
          }
          r0(c) = v0;
          r1(c) = v1;
          r2(c) = v2;
        }
      }
      rows.push_back(r0);
      rhs.emplace_back(0.0);
      if (opt.gradient == GradientRule::exact) {
        rows.push_back(opt.gradient_weight * r1);
        rhs.emplace_back(opt.gradient_weight);
        rows.push_back(opt.gradient_weight * r2);
        rhs.emplace_back(0.0, opt.gradient_weight);
      } else {
        // normal derivative proportional to n1 + i n2, scale left free
        rows.push_back(opt.gradient_weight * (r2 - I * r1));
        rhs.emplace_back(0.0);
        mean_row += 0.5 * (r1 - I * r2);
      }
    }
    if (opt.gradient == GradientRule::conformal) {
      // mean of the (n1 + i n2) coefficient fixed to 1, weighted like a full sample set
      const double w = std::sqrt(static_cast<double>(frames.size()));
      rows.push_back(w * mean_row / static_cast<double>(frames.size()));
      rhs.emplace_back(w);
    }
  }

  Eigen::MatrixXcd A(static_cast<Eigen::Index>(rows.size()), cols);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    b(static_cast<Eigen::Index>(i)) = rhs[i];
  }
  // Tikhonov through the SVD: the normal equations would square the
  // condition number, which is far too large for double precision here
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) throw DesignError("design_bessel_sum: collocation system is rank deficient");
  const double lambda = opt.regularization * sv(0);
  const Eigen::VectorXcd ub = svd.matrixU().adjoint() * b;
  Eigen::VectorXcd filtered(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) filtered(i) = ub(i) * (sv(i) / (sv(i) * sv(i) + lambda * lambda));
  const Eigen::VectorXcd c = svd.matrixV() * filtered;
  if (!c.allFinite()) throw DesignError("design_bessel_sum: collocation system is rank deficient");

  Solved out;
  out.residual = (A * c - b).norm() / b.norm();
  for (int comp = 0; comp < 2; ++comp) {
    out.fields[comp].n = 3;
    out.fields[comp].R = opt.center_radius;
    if (offset[comp] < 0) continue;
    for (int j = 0; j < N; ++j) out.fields[comp].terms.push_back({c(offset[comp] + j), Eigen::VectorXd(centers[j])});
  }
  return out;
}

// first-order estimate of how far the nodal set sits from the targets:
// max |u| / sigma_min over points between the collocation samples
double displacement_estimate(const DesignResult& d, const std::vector<DesignTarget>& targets, int samples,
                             const spinor3::CliffordRep3& cliff) {
  double worst = 0.0;
  for (const auto& t : targets) {
    const auto f = realized_field(d, t.component, cliff);
    for (const auto& x : resample_closed(t.curve, 2 * samples)) {
      const double s = nodal::smallest_singular_value(nodal::jacobian_fd(f, x));
      worst = std::max(worst, s > 0.0 ? std::abs(f(x)) / s : std::numeric_limits<double>::infinity());
    }
  }
  return worst;
}

}  // namespace

DesignResult design_bessel_sum(const std::vector<DesignTarget>& targets, int n, int N, const DesignOptions& opt) {
  if (n != 3) throw std::invalid_argument("design_bessel_sum: only n = 3 is supported");
  if (N < 1) throw std::invalid_argument("design_bessel_sum: budget must be positive");
  if (opt.winding_search < 0) throw std::invalid_argument("design_bessel_sum: winding search must be >= 0");
  check_targets(targets);
  opt.cliff.validate();

  // windings to try: the given ones, or every combination in [-s, s]
  std::vector<std::vector<int>> candidates;
  if (opt.winding_search == 0) {
    std::vector<int> w;
    for (const auto& t : targets) w.push_back(t.winding);
    candidates.push_back(w);
  } else {
    if (targets.size() > 3) throw std::invalid_argument("design_bessel_sum: winding search takes at most 3 targets");
    const int s = opt.winding_search;
    std::vector<int> w(targets.size(), -s);
    while (true) {
      candidates.push_back(w);
      std::size_t i = 0;
      while (i < w.size() && ++w[i] > s) w[i++] = -s;
      if (i == w.size()) break;
    }
  }

  DesignResult res;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : candidates) {
    auto tw = targets;
    for (std::size_t i = 0; i < tw.size(); ++i) tw[i].winding = w[i];
    auto solved = solve_collocation(tw, N, opt);
    DesignResult cand;
    cand.fields = std::move(solved.fields);
    cand.mode = opt.mode;
    cand.collocation_residual = solved.residual;
    cand.windings = w;
    const double disp = candidates.size() > 1 ? displacement_estimate(cand, tw, opt.samples_per_curve, opt.cliff) : 0.0;
    if (candidates.size() == 1 || disp < best) {
      best = disp;
      res = std::move(cand);
      res.displacement_estimate = disp;
    }
  }
  if (res.collocation_residual > opt.max_residual) {
    throw DesignError("design_bessel_sum: collocation residual " + std::to_string(res.collocation_residual) +
                      " exceeds the accepted level");
  }
  for (const auto& f : res.fields) {
    for (const auto& t : f.terms) res.coefficient_l1 += std::abs(t.c);
  }
  if (!opt.verify) return res;

  for (const auto& t : targets) {
    Vector3d lo = Vector3d::Constant(1e300), hi = Vector3d::Constant(-1e300);
    for (const auto& v : t.curve) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    const nodal::Box box{lo.array() - 0.2, hi.array() + 0.2};
    const auto f = realized_field(res, t.component, opt.cliff);
    const auto ex = nodal::extract_nodal(f, box, opt.verify_h);
    double d = 0.0;
    const int idx = match_curve(ex.curves, t.curve, &d);
    if (idx < 0 || d > opt.tolerance) {
      throw DesignError("design_bessel_sum: realized curve misses its target (Hausdorff " + std::to_string(d) + ")");
    }
    const auto& cur = ex.curves[static_cast<std::size_t>(idx)];
    if (!(cur.min_margin() > 0.0)) throw DesignError("design_bessel_sum: realized curve is not transverse");
    res.hausdorff.push_back(d);
    res.margins.push_back(cur.min_margin());
    res.realized.push_back(cur);
  }
  return res;
}

}  // namespace spinorloc::helmholtz
