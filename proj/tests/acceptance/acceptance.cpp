// One PASS/FAIL line per acceptance criterion. Exit status 1 when any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "spinorloc/design.hpp"
#include "spinorloc/harmonics.hpp"
#include "spinorloc/io.hpp"
#include "spinorloc/realize.hpp"
#include "spinorloc/specialfn.hpp"
#include "spinorloc/spinor3.hpp"
#include "spinorloc/torus.hpp"

using namespace spinorloc;
using helmholtz::BesselSum;
using helmholtz::Complex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

BesselSum random_sum(int terms, double R, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BesselSum s;
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

sphere::SpherePoint basis_point(int i) {
  Eigen::Vector4d v = Eigen::Vector4d::Zero();
  v(i) = 1.0;
  return sphere::SpherePoint(v);
}

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

Outcome darboux_rate() {
  double lo = 1e9, hi = 0.0;
  for (int n : {3, 4}) {
    for (double t : {0.5, 2.0, 5.0}) {
      auto err = [&](int k) {
        const double a = 0.5 * n - 1;
        return std::fabs(std::pow(k, -a) *
                             specialfn::jacobi_p(specialfn::PolyIndex::ultraspherical(n, k), std::cos(t / k)) -
                         specialfn::darboux_limit(n, t));
      };
      for (int k : {50, 100, 200}) {
        const double r = err(2 * k) / err(k);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
  }
  return {lo >= 0.3 && hi <= 0.8, "e(2k)/e(k) in [" + num(lo) + ", " + num(hi) + "]"};
}

Outcome normalization() {
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k <= 500; ++k) worst = std::max(worst, std::fabs(specialfn::gegenbauer_cnk(n, k, 1.0) - 1.0));
  return {worst <= 1e-12, "max |C^n_k(1) - 1| = " + num(worst)};
}

Outcome localization_rate() {
  const auto chart = sphere::Chart::random(basis_point(0), 3);
  bool ok = true;
  double lo = 1e9, hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto phi = random_sum(10, 5.0, seed);
    std::vector<std::vector<double>> e;
    for (int k : {40, 80, 160}) e.push_back(harmonics::localization_error(phi, harmonics::synthesize(phi, k, chart), 2, 0.1).sup_error);
    for (int i = 0; i < 2; ++i) {
      const double r = e[i + 1][0] / e[i][0];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      ok = ok && r >= 0.3 && r <= 0.8 && e[i + 1][1] < e[i][1] && e[i + 1][2] < e[i][2];
    }
  }
  return {ok, "order-0 ratios in [" + num(lo) + ", " + num(hi) + "], orders 1-2 monotone: " + (ok ? "yes" : "see ratios")};
}

Outcome parity() {
  const auto chart = sphere::Chart::random(basis_point(0), 4);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int k : {40, 41}) {
    const auto y = harmonics::synthesize(random_sum(10, 5.0, 7), k, chart);
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < 1000; ++i) {
      Eigen::Vector4d p(g(rng), g(rng), g(rng), g(rng));
      p.normalize();
      worst = std::max(worst, std::abs(harmonics::eval(y, Eigen::VectorXd(-p)) - sign * harmonics::eval(y, Eigen::VectorXd(p))));
    }
  }
  return {worst <= 1e-10, "max |Y(-p) - (-1)^k Y(p)| = " + num(worst)};
}

Outcome decay() {
  double lo = 1e9, hi = 0.0;
  for (int k : {100, 200, 400}) {
    const double v = k * harmonics::decay_profile(3, k, 0.5);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {hi / lo - 1.0 <= 0.2, "k max|C^3_k| in [" + num(lo) + ", " + num(hi) + "], variation " + num(hi / lo - 1.0)};
}

Outcome multi_ball() {
  // the first two seeded sums of the localization-rate fixture
  const int k = 160;
  const auto s1 = random_sum(10, 5.0, 1), s2 = random_sum(10, 5.0, 2);
  const auto c1 = sphere::Chart::random(basis_point(0), 11), c2 = sphere::Chart::random(basis_point(1), 12);
  const auto M = harmonics::multi_synthesize({{s1, c1}, {s2, c2}}, k);
  bool ok = true;
  std::string detail = "multi/single C0:";
  const std::array<std::pair<const BesselSum*, const sphere::Chart*>, 2> balls{{{&s1, &c1}, {&s2, &c2}}};
  for (std::size_t a = 0; a < 2; ++a) {
    const double single =
        harmonics::localization_error(*balls[a].first, harmonics::synthesize(*balls[a].first, k, *balls[a].second), 0, 0.1)
            .sup_error[0];
    const double multi = harmonics::localization_error(*balls[a].first, M, 0, 0.1, a).sup_error[0];
    ok = ok && multi <= 1.5 * single;
    detail += " " + num(multi) + "/" + num(single) + " = " + num(multi / single);
  }
  bool rejected = false;
  try {
    harmonics::multi_synthesize({{s1, c1}, {s2, sphere::Chart::random(c1.base().antipode(), 13)}}, k);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  return {ok && rejected, detail + ", antipodal rejected: " + (rejected ? "yes" : "no")};
}

Outcome dirac_constants() {
  double worst = 0.0;
  for (const auto& v : {spinor3::Spinor(1.0, 0.0), spinor3::Spinor(0.0, 1.0), spinor3::Spinor(Complex(1, 0.5), Complex(-0.3, 2))}) {
    worst = std::max(worst, spinor3::dirac_residual(spinor3::SpinorField3::constant(v), 1.5, 100));
  }
  return {worst <= 1e-10, "residual at 3/2 = " + num(worst)};
}

Outcome projection() {
  const auto chart = sphere::Chart::left_invariant(basis_point(0));
  bool ok = true;
  std::string detail;
  for (int k : {10, 30}) {
    const auto tilde = spinor3::SpinorField3::from_components(harmonics::synthesize(random_sum(5, 3.0, 21), k, chart),
                                                              harmonics::synthesize(random_sum(5, 3.0, 22), k, chart));
    const auto psi = spinor3::dirac_project(tilde, k);
    const double res = spinor3::dirac_residual(psi, 1.5 + k, 100);
    const auto twice = spinor3::dirac_project(psi, k);
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    double idem = 0.0, scale = 0.0;
    for (int i = 0; i < 50; ++i) {
      Eigen::Vector4d q(g(rng), g(rng), g(rng), g(rng));
      q.normalize();
      idem = std::max(idem, (spinor3::eval(twice, q) - spinor3::eval(psi, q)).norm());
      scale = std::max(scale, spinor3::eval(psi, q).norm());
    }
    idem /= std::max(scale, 1e-300);
    double ratio_lo = 1e9, ratio_hi = 0.0;
    for (int a = 0; a < 2; ++a) {
      auto comp = [&](const Eigen::VectorXd& q) { return spinor3::eval(psi, Eigen::Vector4d(q))(a); };
      const double r1 = harmonics::laplace_residual(comp, 3, k * (k + 2.0), 8, 4e-3);
      const double r2 = harmonics::laplace_residual(comp, 3, k * (k + 2.0), 8, 2e-3);
      ratio_lo = std::min(ratio_lo, r1 / r2);
      ratio_hi = std::max(ratio_hi, r1 / r2);
    }
    ok = ok && res <= 1e-6 && idem <= 1e-9 && ratio_lo >= 3.5 && ratio_hi <= 4.5;
    detail += "k=" + std::to_string(k) + ": residual " + num(res) + ", idempotence " + num(idem) +
              ", stencil ratio [" + num(ratio_lo) + ", " + num(ratio_hi) + "]; ";
  }
  return {ok, detail};
}

Outcome hopf_realization() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto targets = helmholtz::hopf_targets();
  const auto d = helmholtz::design_bessel_sum(targets, 3, 100, helmholtz::hopf_design_options());
  std::vector<realize::RealizeReport> reps;
  for (int k : {60, 120}) reps.push_back(realize::realize_targets(d, targets, k));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = secs < 600.0;
  std::string detail;
  for (const auto& r : reps) {
    detail += "k=" + std::to_string(r.k) + ": lk " + (r.linked ? std::to_string(r.linking) : "n/a");
    for (const auto& c : r.components) {
      ok = ok && c.found && c.min_margin > 0.0;
      detail += ", H" + std::to_string(c.component) + " " + num(c.hausdorff) + " margin " + num(c.min_margin);
    }
    detail += "; ";
  }
  ok = ok && reps[1].linked && reps[1].linking == 1;
  for (std::size_t a = 0; a < targets.size(); ++a) {
    ok = ok && reps[1].components[a].hausdorff < reps[0].components[a].hausdorff;
  }
  return {ok, detail + "runtime " + num(secs) + " s"};
}

std::size_t brute_count(int k) {
  std::size_t c = 0;
  for (int a = -k; a <= k; ++a)
    for (int b = -k; b <= k; ++b)
      for (int e = -k; e <= k; ++e)
        if (a * a + b * b + e * e == k * k) ++c;
  return c;
}

Outcome torus_counts() {
  bool counts = torus::lattice_directions(3, 1).size() == 6 && torus::lattice_directions(3, 3).size() == 30;
  for (int k = 1; k <= 50; ++k) counts = counts && torus::lattice_directions(3, k).size() == brute_count(k);
  std::vector<double> d;
  for (int k : {101, 201, 401}) d.push_back(torus::cap_discrepancy(torus::lattice_directions(3, k)));
  const bool decreasing = d[1] < d[0] && d[2] < d[1];
  return {counts && decreasing, std::string("counts k<=50 match brute force: ") + (counts ? "yes" : "no") +
                                    ", discrepancy at k=101,201,401: " + num(d[0]) + ", " + num(d[1]) + ", " + num(d[2])};
}

Outcome determinism() {
  const fs::path tmp = fs::temp_directory_path() / "spinorloc_acceptance";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  std::vector<std::string> csv;
  for (int run = 0; run < 2; ++run) {
    const auto out = tmp / ("run" + std::to_string(run));
    const std::string cmd = std::string(SPINORLOC_CLI) + " verify --config " + DATA_DIR +
                            "/verify_single_center.cfg --out " + out.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "cmd_verify failed"};
    csv.push_back(io::read_text((out / "verify.csv").string()));
  }
  const bool same = csv[0] == csv[1] && !csv[0].empty();
  return {same, std::string("two runs byte-identical: ") + (same ? "yes" : "no") + " (" +
                    std::to_string(csv[0].size()) + " bytes)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Darboux rate", darboux_rate},
      {"normalization", normalization},
      {"inverse localization rate", localization_rate},
      {"parity", parity},
      {"decay", decay},
      {"multi-ball realization", multi_ball},
      {"Dirac spectrum pinning", dirac_constants},
      {"projection", projection},
      {"end-to-end nodal realization", hopf_realization},
      {"torus counts and discrepancy", torus_counts},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %zu %s: %s | %s | %.2f s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
