#include "spinorloc/spinor3.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "spinorloc/specialfn.hpp"

namespace spinorloc::spinor3 {

namespace {

constexpr Complex kI{0.0, 1.0};

// All set partitions of {0..m-1}, blocks in increasing order of positions.
std::vector<std::vector<std::vector<int>>> set_partitions(int m) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> cur;
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == m) {
      out.push_back(cur);
      return;
    }
    // by index: the recursion may reallocate cur
    for (std::size_t b = 0; b < cur.size(); ++b) {
      cur[b].push_back(pos);
      self(self, pos + 1);
      cur[b].pop_back();
    }
    cur.push_back({pos});
    self(self, pos + 1);
    cur.pop_back();
  };
  rec(rec, 0);
  return out;
}

const std::vector<std::vector<std::vector<int>>>& partitions_cached(int m) {
  static std::map<int, std::vector<std::vector<std::vector<int>>>> cache;
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, set_partitions(m)).first;
  return it->second;
}

// q * e_{u_1} * ... * e_{u_r}
Eigen::Vector4d right_mul_word(Eigen::Vector4d q, const std::vector<int>& letters) {
  for (int l : letters) q = sphere::quat::mul(q, sphere::quat::imag_unit(l));
  return q;
}

// Values of X_w Y at q for every word in `words`, sharing the Gegenbauer jet
// of each term across words.
std::vector<Complex> component_words(const harmonics::UltrasphericalSum& Y, const Eigen::Vector4d& q,
                                     const std::vector<const std::vector<int>*>& words) {
  std::vector<Complex> out(words.size(), 0.0);
  if (Y.terms.empty()) return out;
  std::size_t L = 0;
  for (const auto* w : words) L = std::max(L, w->size());

  // q-side products for each block of each partition of each word
  struct Part {
    int order;
    std::vector<Eigen::Vector4d> blocks;
  };
  std::vector<std::vector<Part>> expansions(words.size());
  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    const auto& w = *words[wi];
    const int m = static_cast<int>(w.size());
    if (m == 0) {
      expansions[wi].push_back({0, {}});
      continue;
    }
    for (const auto& part : partitions_cached(m)) {
      Part P{static_cast<int>(part.size()), {}};
      for (const auto& block : part) {
        std::vector<int> sub;
        for (int pos : block) sub.push_back(w[static_cast<std::size_t>(pos)]);
        P.blocks.push_back(right_mul_word(q, sub));
      }
      expansions[wi].push_back(std::move(P));
    }
  }

  std::vector<double> jet(L + 1);
  for (const auto& t : Y.terms) {
    const Eigen::Vector4d p = t.p.vec();
    const double s = std::clamp(q.dot(p), -1.0, 1.0);
    jet[0] = specialfn::gegenbauer_cnk(Y.n, Y.k, s);
    for (std::size_t r = 1; r <= L; ++r) jet[r] = specialfn::gegenbauer_cnk_deriv(Y.n, Y.k, s, static_cast<int>(r));
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      double v = 0.0;
      for (const auto& P : expansions[wi]) {
        double prod = jet[static_cast<std::size_t>(P.order)];
        if (prod == 0.0) continue;
        for (const auto& qe : P.blocks) prod *= qe.dot(p);
        v += prod;
      }
      out[wi] += t.c * v;
    }
  }
  for (auto& v : out) v *= Y.norm;
  return out;
}

void merge_words(SpinorField3& f) {
  std::map<std::vector<int>, Mat2> acc;
  for (const auto& w : f.words) {
    auto it = acc.find(w.letters);
    if (it == acc.end()) acc.emplace(w.letters, w.M);
    else it->second += w.M;
  }
  f.words.clear();
  for (auto& [letters, M] : acc) {
    if (M.cwiseAbs().maxCoeff() == 0.0) continue;
    f.words.push_back({letters, M});
  }
}

Eigen::Vector4d random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector4d v(g(rng), g(rng), g(rng), g(rng));
  return v / v.norm();
}

}  // namespace

// ------------------------------------------------------------------ Clifford

CliffordRep3 CliffordRep3::standard() {
  std::array<Mat2, 3> g;
  g[0] << 0, kI, kI, 0;
  g[1] << 0, 1, -1, 0;
  g[2] << kI, 0, 0, -kI;
  return oriented(g);
}

CliffordRep3 CliffordRep3::oriented(const std::array<Mat2, 3>& candidate) {
  CliffordRep3 c;
  c.gamma = candidate;
  c.validate();
  const Mat2 omega = c.gamma[0] * c.gamma[1] * c.gamma[2];
  const Mat2 id = Mat2::Identity();
  if ((omega - id).cwiseAbs().maxCoeff() < 1e-12) {
    c.orientation = 1;
  } else if ((omega + id).cwiseAbs().maxCoeff() < 1e-12) {
    for (auto& g : c.gamma) g = -g;
    c.orientation = -1;
  } else {
    throw std::invalid_argument("CliffordRep3: gamma_1 gamma_2 gamma_3 is not +-Id");
  }
  return c;
}

Mat2 CliffordRep3::apply(const Eigen::Vector3d& v) const {
  return v(0) * gamma[0] + v(1) * gamma[1] + v(2) * gamma[2];
}

void CliffordRep3::validate() const {
  for (int a = 0; a < 3; ++a) {
    if ((gamma[a] + gamma[a].adjoint()).cwiseAbs().maxCoeff() > 1e-14) {
      throw std::invalid_argument("CliffordRep3: generator is not anti-Hermitian");
    }
    for (int b = 0; b < 3; ++b) {
      const Mat2 ac = gamma[a] * gamma[b] + gamma[b] * gamma[a];
      const Mat2 want = (a == b ? -2.0 : 0.0) * Mat2::Identity();
      if ((ac - want).cwiseAbs().maxCoeff() > 1e-14) {
        throw std::invalid_argument("CliffordRep3: anticommutation relation fails");
      }
    }
  }
}

// -------------------------------------------------------------- SpinorField3

std::size_t SpinorField3::max_word_length() const {
  std::size_t L = 0;
  for (const auto& w : words) L = std::max(L, w.letters.size());
  return L;
}

SpinorField3 SpinorField3::from_components(const harmonics::UltrasphericalSum& y1,
                                           const harmonics::UltrasphericalSum& y2, const CliffordRep3& cliff) {
  if (y1.n != 3 || y2.n != 3) throw std::invalid_argument("SpinorField3: components must live on S^3");
  if (!y1.terms.empty() && !y2.terms.empty() && y1.k != y2.k) {
    throw std::invalid_argument("SpinorField3: components must share the degree");
  }
  SpinorField3 f;
  f.comp = {y1, y2};
  f.words.push_back({{}, Mat2::Identity()});
  f.cliff = cliff;
  return f;
}

SpinorField3 SpinorField3::constant(const Spinor& v, const CliffordRep3& cliff) {
  std::array<harmonics::UltrasphericalSum, 2> y;
  for (int a = 0; a < 2; ++a) {
    y[a].n = 3;
    y[a].k = 0;
    y[a].norm = harmonics::kernel_normalization(3);
    if (v(a) != Complex(0.0)) {
      y[a].terms.push_back({v(a) / y[a].norm, sphere::SpherePoint(Eigen::Vector4d(1, 0, 0, 0))});
    }
  }
  return from_components(y[0], y[1], cliff);
}

Complex word_derivative(const harmonics::UltrasphericalSum& Y, const Eigen::Vector4d& q,
                        const std::vector<int>& word) {
  return component_words(Y, q, {&word})[0];
}

Spinor eval(const SpinorField3& psi, const Eigen::Vector4d& q) {
  std::vector<const std::vector<int>*> ws;
  for (const auto& w : psi.words) ws.push_back(&w.letters);
  const auto v0 = component_words(psi.comp[0], q, ws);
  const auto v1 = component_words(psi.comp[1], q, ws);
  Spinor out = Spinor::Zero();
  for (std::size_t i = 0; i < psi.words.size(); ++i) out += psi.words[i].M * Spinor(v0[i], v1[i]);
  return out;
}

Spinor eval_pullback(const SpinorField3& psi, const sphere::Chart& chart, const Eigen::VectorXd& x) {
  const int k = std::max(1, psi.k());
  return eval(psi, chart.to_sphere(x / k).vec());
}

SpinorField3 dirac_apply(const SpinorField3& psi) {
  SpinorField3 out = psi;
  out.words.clear();
  for (const auto& w : psi.words) {
    out.words.push_back({w.letters, 1.5 * w.M});
    for (int a = 0; a < 3; ++a) {
      std::vector<int> letters{a};
      letters.insert(letters.end(), w.letters.begin(), w.letters.end());
      out.words.push_back({std::move(letters), psi.cliff.gamma[a] * w.M});
    }
  }
  merge_words(out);
  return out;
}

Spinor dirac_apply(const SpinorField3& psi, const sphere::SpherePoint& p) {
  if (p.ambient_dim() != 4) throw std::invalid_argument("dirac_apply: point is not on S^3");
  return eval(dirac_apply(psi), p.vec());
}

Spinor dirac_apply_fd(const SpinorField3& psi, const sphere::SpherePoint& p, double h) {
  const Eigen::Vector4d q = p.vec();
  Spinor out = 1.5 * eval(psi, q);
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector4d e = sphere::quat::imag_unit(a);
    const Eigen::Vector4d fwd = sphere::quat::mul(q, Eigen::Vector4d(std::cos(h), 0, 0, 0) + std::sin(h) * e);
    const Eigen::Vector4d bwd = sphere::quat::mul(q, Eigen::Vector4d(std::cos(h), 0, 0, 0) - std::sin(h) * e);
    out += psi.cliff.gamma[a] * ((eval(psi, fwd) - eval(psi, bwd)) / (2.0 * h));
  }
  return out;
}

SpinorField3 dirac_project(const SpinorField3& psi_tilde, int k) {
  if (k < 0) throw std::invalid_argument("dirac_project: negative degree");
  for (const auto& Y : psi_tilde.comp) {
    if (Y.terms.empty()) continue;
    if (Y.n != 3 || Y.k != k) throw std::invalid_argument("dirac_project: component degree differs from k");
    if (k >= 1 && harmonics::laplace_residual(Y, 4) > 1e-3 * Y.energy()) {
      throw std::invalid_argument("dirac_project: component fails the Laplace check");
    }
  }
  // on degree-k components Dslash^2 = k(k+2) + 1 = mu^2, which collapses the
  // two-step formula to (psi~ + Dslash psi~ / mu) / 2
  const double mu = k + 1.0;
  SpinorField3 out = psi_tilde;
  out.words.clear();
  const SpinorField3 d = dirac_apply(psi_tilde);
  for (const auto& w : psi_tilde.words) out.words.push_back({w.letters, (0.5 - 0.25 / mu) * w.M});
  for (const auto& w : d.words) out.words.push_back({w.letters, (0.5 / mu) * w.M});
  merge_words(out);
  return out;
}

double dirac_residual(const SpinorField3& psi, double lambda, int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("dirac_residual: need at least one sample");
  const SpinorField3 d = dirac_apply(psi);
  std::mt19937_64 rng(seed);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::Vector4d q = random_quaternion(rng);
    const Spinor v = eval(psi, q);
    worst = std::max(worst, (eval(d, q) - lambda * v).norm());
    scale = std::max(scale, v.norm());
  }
  return scale > 0.0 ? worst / scale : worst;
}

// ------------------------------------------------------------- flat check

EuclideanDiracReport euclidean_dirac_check(const std::array<helmholtz::ScalarField, 2>& phi,
                                           const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, double h,
                                           int samples, const CliffordRep3& cliff) {
  if (!(h > 0.0) || samples < 1) throw std::invalid_argument("euclidean_dirac_check: bad step or grid");
  EuclideanDiracReport rep;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j)
      for (int l = 0; l < samples; ++l) {
        const int idx[3] = {i, j, l};
        Eigen::Vector3d x;
        for (int d = 0; d < 3; ++d) {
          const double t = samples == 1 ? 0.5 : static_cast<double>(idx[d]) / (samples - 1);
          x(d) = lo(d) + t * (hi(d) - lo(d));
        }
        const Spinor v(phi[0](x), phi[1](x));
        Spinor d0 = Spinor::Zero();
        Spinor lap = Spinor::Zero();
        for (int mu = 0; mu < 3; ++mu) {
          Eigen::Vector3d xp = x, xm = x;
          xp(mu) += h;
          xm(mu) -= h;
          const Spinor vp(phi[0](xp), phi[1](xp));
          const Spinor vm(phi[0](xm), phi[1](xm));
          d0 += cliff.gamma[mu] * ((vp - vm) / (2.0 * h));
          lap += (vp - 2.0 * v + vm) / (h * h);
        }
        rep.dirac = std::max(rep.dirac, (d0 - v).norm());
        rep.helmholtz = std::max({rep.helmholtz, std::abs(lap(0) + v(0)), std::abs(lap(1) + v(1))});
      }
  return rep;
}

EuclideanDiracReport euclidean_dirac_check(const std::array<helmholtz::BesselSum, 2>& phi,
                                           const Eigen::Vector3d& lo, const Eigen::Vector3d& hi, double h,
                                           int samples, const CliffordRep3& cliff) {
  std::array<helmholtz::ScalarField, 2> f;
  for (int a = 0; a < 2; ++a) {
    if (phi[a].n != 3) throw std::invalid_argument("euclidean_dirac_check: components must live in R^3");
    const auto* s = &phi[a];
    f[a] = [s](const Eigen::VectorXd& x) {
      return s->terms.empty() ? Complex(0.0) : helmholtz::eval_bessel_sum(*s, x);
    };
  }
  return euclidean_dirac_check(f, lo, hi, h, samples, cliff);
}

}  // namespace spinorloc::spinor3
