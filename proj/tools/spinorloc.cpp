// spinorloc: command line driver. Every command reads a flat key = value
// config (--config FILE) whose keys can be overridden by --key VALUE flags,
// writes its outputs plus manifest.json into --out DIR (or the primary
// output to stdout), and exits with
//   0 success, 2 config error, 3 tolerance not met, 4 numerical failure.
// Failures print {"error": {...}} on stdout.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "spinorloc/design.hpp"
#include "spinorloc/harmonics.hpp"
#include "spinorloc/helmholtz.hpp"
#include "spinorloc/io.hpp"
#include "spinorloc/nodal.hpp"
#include "spinorloc/realize.hpp"
#include "spinorloc/spinor3.hpp"
#include "spinorloc/torus.hpp"

namespace fs = std::filesystem;
using namespace spinorloc;
using io::json;

#ifndef SPINORLOC_VERSION
#define SPINORLOC_VERSION "dev"
#endif

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ToleranceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void log(const std::string& s) { std::cerr << "spinorloc: " << s << '\n'; }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

// ------------------------------------------------------------------ config

struct Key {
  std::string name, fallback, help;
};

class Config {
 public:
  std::map<std::string, std::string> kv;
  fs::path base_dir = ".";

  bool has(const std::string& k) const { return kv.count(k) && !kv.at(k).empty(); }
  std::string str(const std::string& k) const { return kv.at(k); }

  double num(const std::string& k) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(kv.at(k), &used);
      if (used != kv.at(k).size() || !std::isfinite(v)) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + k + "': expected a number, got '" + kv.at(k) + "'");
    }
  }
  int integer(const std::string& k) const {
    const double v = num(k);
    if (v != std::floor(v) || std::fabs(v) > 2e9) throw ConfigError("key '" + k + "': expected an integer");
    return static_cast<int>(v);
  }
  bool flag(const std::string& k) const {
    const auto& v = kv.at(k);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + k + "': expected true or false");
  }
  std::vector<double> nums(const std::string& k) const {
    std::vector<double> out;
    for (const auto& s : split(kv.at(k), ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(s, &used));
        if (used != s.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError("key '" + k + "': bad number list '" + kv.at(k) + "'");
      }
    }
    return out;
  }
  std::vector<int> sweep(const std::string& k) const {
    std::vector<int> out;
    for (double v : nums(k)) {
      if (v != std::floor(v) || v < 1) throw ConfigError("key '" + k + "': entries must be positive integers");
      if (!out.empty() && v <= out.back()) throw ConfigError("key '" + k + "': sweep must be strictly increasing");
      out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw ConfigError("key '" + k + "' is empty");
    return out;
  }
  std::string path(const std::string& p) const {
    const fs::path q(p);
    return (q.is_absolute() ? q : base_dir / q).string();
  }
};

void read_config_file(const std::string& file, Config& cfg, const std::vector<Key>& keys) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file);
  cfg.base_dir = fs::path(file).parent_path();
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(file + ":" + std::to_string(no) + ": expected key = value");
    const auto k = trim(line.substr(0, eq));
    if (std::none_of(keys.begin(), keys.end(), [&](const Key& key) { return key.name == k; })) {
      throw ConfigError(file + ":" + std::to_string(no) + ": unknown key '" + k + "'");
    }
    cfg.kv[k] = trim(line.substr(eq + 1));
  }
}

// ------------------------------------------------------------------ run

class Run {
 public:
  Run(std::string command, Config cfg, std::string out) : command_(std::move(command)), cfg_(std::move(cfg)), out_(std::move(out)) {
    std::string canon = command_ + "\n";
    for (const auto& [k, v] : cfg_.kv) canon += k + "=" + v + "\n";
    if (cfg_.has("input")) {
      for (const auto& p : split(cfg_.str("input"), ',')) {
        if (p == "zero") continue;
        canon += io::read_text(cfg_.path(p));
      }
    }
    hash_ = io::sha256_hex(canon);
    if (!out_.empty()) fs::create_directories(out_);
  }

  const Config& cfg() const { return cfg_; }
  const std::string& hash() const { return hash_; }
  json results = json::object();

  void emit_json(const std::string& name, json j, bool primary = false) {
    j["manifest"] = hash_;
    emit(name, io::dump(j), primary);
  }
  // CSV and PLY carry the hash in a comment line
  void emit_csv(const std::string& name, const std::string& body, bool primary = false) {
    emit(name, "# manifest " + hash_ + "\n" + body, primary);
  }
  void emit_ply(const std::string& name, std::string ply) {
    const std::string anchor = "format ascii 1.0\n";
    ply.insert(ply.find(anchor) + anchor.size(), "comment manifest " + hash_ + "\n");
    emit(name, ply, false);
  }

  void finish() {
    if (out_.empty()) return;
    json m;
    m["type"] = "Manifest";
    m["tool"] = "spinorloc";
    m["version"] = SPINORLOC_VERSION;
    m["command"] = command_;
    m["inputs_hash"] = hash_;
    m["seed"] = cfg_.kv.count("seed") ? cfg_.str("seed") : "";
    json c = json::object();
    for (const auto& [k, v] : cfg_.kv) c[k] = v;
    m["config"] = c;
    m["torus_convention"] = "e^{2 pi i m.x} on R^n/Z^n";
    m["outputs"] = outputs_;
    m["results"] = results;
    io::write_text((fs::path(out_) / "manifest.json").string(), io::dump(m));
  }

 private:
  void emit(const std::string& name, const std::string& content, bool primary) {
    if (out_.empty()) {
      if (primary) std::cout << content;
      return;
    }
    io::write_text((fs::path(out_) / name).string(), content);
    outputs_.push_back({{"file", name}, {"sha256", io::sha256_hex(content)}});
  }

  std::string command_;
  Config cfg_;
  std::string out_;
  std::string hash_;
  json outputs_ = json::array();
};

void check_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericalError(what + " is not finite");
}

// ------------------------------------------------------------------ shared helpers

sphere::Chart make_chart(const Config& cfg, int n, int index) {
  Eigen::VectorXd base = Eigen::VectorXd::Zero(n + 1);
  base(0) = 1.0;
  if (cfg.has("base")) {
    const auto all = split(cfg.str("base"), ';');
    if (index >= static_cast<int>(all.size())) throw ConfigError("key 'base': fewer base points than inputs");
    Config one;
    one.kv["base"] = all[index];
    const auto v = one.nums("base");
    if (static_cast<int>(v.size()) != n + 1) throw ConfigError("key 'base': base points need n + 1 coordinates");
    base = Eigen::Map<const Eigen::VectorXd>(v.data(), n + 1);
    if (base.norm() == 0.0) throw ConfigError("key 'base': zero vector");
  }
  const auto p = sphere::SpherePoint::normalized(base);
  const auto kind = cfg.str("chart");
  if (kind == "left_invariant") {
    if (n != 3) throw ConfigError("chart = left_invariant needs n = 3");
    return sphere::Chart::left_invariant(p);
  }
  if (kind == "random") return sphere::Chart::random(p, static_cast<std::uint64_t>(cfg.integer("seed")) + index);
  throw ConfigError("key 'chart': expected random or left_invariant");
}

std::function<helmholtz::Complex(const Eigen::VectorXd&)> builtin_density(const std::string& name) {
  if (name == "constant") return [](const Eigen::VectorXd&) { return helmholtz::Complex(1.0); };
  if (name == "linear") return [](const Eigen::VectorXd& x) { return helmholtz::Complex(x(0)); };
  if (name == "mixed") {
    return [](const Eigen::VectorXd& x) { return helmholtz::Complex(x(0) * x(1), x(x.size() - 1)); };
  }
  throw ConfigError("key 'density': expected constant, linear or mixed");
}

helmholtz::BesselSum load_bessel(const Config& cfg, const std::string& p) {
  return io::bessel_sum_from_json(io::read_json(cfg.path(p)));
}

std::vector<std::string> inputs(const Config& cfg) {
  if (!cfg.has("input")) throw ConfigError("key 'input' is required");
  return split(cfg.str("input"), ',');
}

// ------------------------------------------------------------------ commands

void cmd_approximate(Run& run) {
  const auto& cfg = run.cfg();
  helmholtz::HerglotzDensity f;
  if (cfg.has("input")) {
    f = io::herglotz_from_json(io::read_json(cfg.path(cfg.str("input"))));
  } else {
    f = helmholtz::HerglotzDensity::sample(cfg.integer("n"), builtin_density(cfg.str("density")), cfg.integer("degree"));
  }
  helmholtz::DiscretizeOptions opt;
  opt.target = cfg.num("target");
  opt.cell = cfg.num("cell");
  log("discretizing a density with " + std::to_string(f.size()) + " nodes");
  const auto r = helmholtz::herglotz_discretize(f, opt);
  check_finite(r.achieved_error, "achieved error");
  run.results["terms"] = r.sum.terms.size();
  run.results["R"] = r.sum.R;
  run.results["achieved_error"] = r.achieved_error;
  run.results["reported_bound"] = r.reported_bound;
  run.emit_json("bessel_sum.json", io::to_json(r.sum), true);
}

harmonics::UltrasphericalSum synthesize_inputs(const Config& cfg, int k) {
  const auto files = inputs(cfg);
  std::vector<std::pair<helmholtz::BesselSum, sphere::Chart>> pairs;
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto s = load_bessel(cfg, files[i]);
    auto c = make_chart(cfg, s.n, static_cast<int>(i));
    pairs.emplace_back(std::move(s), std::move(c));
  }
  if (pairs.size() == 1) return harmonics::synthesize(pairs[0].first, k, pairs[0].second);
  return harmonics::multi_synthesize(pairs, k);
}

void cmd_synthesize(Run& run) {
  const auto& cfg = run.cfg();
  bool first = true;
  for (int k : cfg.sweep("k")) {
    const auto y = synthesize_inputs(cfg, k);
    const double res =
        harmonics::laplace_residual(y, 16, 0.0, static_cast<std::uint64_t>(cfg.integer("seed"))) / y.energy();
    check_finite(res, "Laplace residual");
    run.results["laplace_residual_over_energy_k" + std::to_string(k)] = res;
    run.emit_json("harmonic_k" + std::to_string(k) + ".json", io::to_json(y), first);
    first = false;
  }
}

harmonics::UltrasphericalSum component_input(const Config& cfg, const std::string& p, int k, int index) {
  if (p == "zero") {
    harmonics::UltrasphericalSum z;
    z.n = 3;
    z.k = k;
    z.norm = harmonics::kernel_normalization(3);
    return z;
  }
  const auto j = io::read_json(cfg.path(p));
  if (j.value("type", "") == "UltrasphericalSum") {
    auto y = io::ultraspherical_from_json(j);
    if (y.k != k) throw ConfigError(p + ": degree " + std::to_string(y.k) + " differs from k");
    return y;
  }
  const auto s = io::bessel_sum_from_json(j);
  return harmonics::synthesize(s, k, make_chart(cfg, s.n, index));
}

void cmd_spinorize(Run& run) {
  const auto& cfg = run.cfg();
  const auto files = inputs(cfg);
  if (files.size() != 2) throw ConfigError("key 'input': spinorize takes two components (use 'zero' for none)");
  if (files[0] == "zero" && files[1] == "zero") throw ConfigError("key 'input': both components are zero");
  const int k = cfg.integer("k");
  // both components share one chart unless two base points are given
  const int second = cfg.has("base") && split(cfg.str("base"), ';').size() > 1 ? 1 : 0;
  const auto tilde = spinor3::SpinorField3::from_components(component_input(cfg, files[0], k, 0),
                                                            component_input(cfg, files[1], k, second));
  const auto psi = spinor3::dirac_project(tilde, k);
  const double res = spinor3::dirac_residual(psi, 1.5 + k, 16, static_cast<std::uint64_t>(cfg.integer("seed")));
  check_finite(res, "Dirac residual");
  run.results["dirac_eigenvalue"] = 1.5 + k;
  run.results["dirac_residual"] = res;
  run.emit_json("spinor_k" + std::to_string(k) + ".json", io::to_json(psi), true);
}

void cmd_verify(Run& run) {
  const auto& cfg = run.cfg();
  const auto files = inputs(cfg);
  if (files.size() != 1) throw ConfigError("key 'input': verify takes one BesselSum");
  const auto phi = load_bessel(cfg, files[0]);
  const auto chart = make_chart(cfg, phi.n, 0);
  const int m = cfg.integer("m");
  if (m < 0 || m > 3) throw ConfigError("key 'm': derivative order must be in 0..3");
  const double h = cfg.num("h");
  const bool spin = cfg.flag("spinor");
  if (spin && phi.n != 3) throw ConfigError("spinor = true needs n = 3");
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));

  std::string csv = "k,energy,laplace_residual_over_energy";
  for (int j = 0; j <= m; ++j) csv += ",c" + std::to_string(j) + "_error";
  if (spin) csv += ",dirac_residual";
  csv += "\n";
  double last = 0.0;
  for (int k : cfg.sweep("k")) {
    log("verify k = " + std::to_string(k));
    const auto y = harmonics::synthesize(phi, k, chart);
    const double lap = harmonics::laplace_residual(y, 16, 0.0, seed) / y.energy();
    const auto err = harmonics::localization_error(phi, y, m, h);
    csv += std::to_string(k) + "," + io::fmt(y.energy()) + "," + io::fmt(lap);
    check_finite(lap, "Laplace residual");
    for (double e : err.sup_error) {
      check_finite(e, "localization error");
      csv += "," + io::fmt(e);
    }
    if (spin) {
      harmonics::UltrasphericalSum zero = y;
      zero.terms.clear();
      const auto psi = spinor3::dirac_project(spinor3::SpinorField3::from_components(y, zero), k);
      const double d = spinor3::dirac_residual(psi, 1.5 + k, 8, seed);
      check_finite(d, "Dirac residual");
      csv += "," + io::fmt(d);
    }
    csv += "\n";
    last = err.sup_error[0];
  }
  run.results["final_c0_error"] = last;
  run.emit_csv("verify.csv", csv, true);
  const double tol = cfg.num("tolerance");
  if (tol > 0.0 && last > tol) {
    throw ToleranceError("order-0 error " + io::fmt(last) + " at the largest k exceeds tolerance " + io::fmt(tol));
  }
}

nodal::Box parse_box(const Config& cfg) {
  const auto v = cfg.nums("box");
  if (v.size() != 6) throw ConfigError("key 'box': expected lo1,lo2,lo3,hi1,hi2,hi3");
  return {Eigen::Vector3d(v[0], v[1], v[2]), Eigen::Vector3d(v[3], v[4], v[5])};
}

json topology(const nodal::ExtractResult& ex, const nodal::Field& f, double h) {
  json t;
  t["curves"] = json::array();
  std::vector<std::size_t> closed;
  for (std::size_t i = 0; i < ex.curves.size(); ++i) {
    const auto& c = ex.curves[i];
    t["curves"].push_back({{"closed", c.closed},
                           {"vertices", c.vertices.size()},
                           {"min_margin", c.min_margin()},
                           {"certified", nodal::certify_stable(f, c, h)}});
    if (c.closed) closed.push_back(i);
  }
  t["flagged_vertices"] = ex.flagged_vertices;
  t["unpolished_vertices"] = ex.unpolished_vertices;
  t["ambiguous_cells"] = ex.ambiguous_cells;
  t["linking"] = json::array();
  for (std::size_t a = 0; a < closed.size(); ++a) {
    for (std::size_t b = a + 1; b < closed.size(); ++b) {
      json e = {{"a", closed[a]}, {"b", closed[b]}};
      try {
        e["linking_number"] = nodal::linking_number(ex.curves[closed[a]], ex.curves[closed[b]]);
      } catch (const nodal::LinkingError& err) {
        e["linking_number"] = nullptr;
        e["error"] = err.what();
      }
      t["linking"].push_back(e);
    }
  }
  return t;
}

void cmd_nodal_hopf(Run& run) {
  const auto& cfg = run.cfg();
  const auto targets = helmholtz::hopf_targets(cfg.num("radius"));
  auto opt = helmholtz::hopf_design_options();
  log("designing the Hopf pair");
  const auto d = helmholtz::design_bessel_sum(targets, 3, cfg.integer("N"), opt);
  json rep;
  rep["design"] = {{"collocation_residual", d.collocation_residual},
                   {"coefficient_l1", d.coefficient_l1},
                   {"limit_hausdorff", d.hausdorff},
                   {"limit_margins", d.margins}};
  rep["targets"] = io::to_json(std::vector<nodal::NodalCurve>{{targets[0].curve, true, {}}, {targets[1].curve, true, {}}});
  rep["realizations"] = json::array();
  realize::RealizeOptions ro;
  ro.h = cfg.num("h");
  const double tol = cfg.num("tolerance");
  std::string failure;
  for (int k : cfg.sweep("k")) {
    log("realizing at k = " + std::to_string(k));
    const auto r = realize::realize_targets(d, targets, k, ro);
    json jr = {{"k", k}, {"target_error", r.target_error}};
    jr["components"] = json::array();
    std::vector<nodal::NodalCurve> got;
    for (const auto& c : r.components) {
      jr["components"].push_back({{"component", c.component},
                                  {"found", c.found},
                                  {"hausdorff", c.hausdorff},
                                  {"min_margin", c.min_margin},
                                  {"curves_in_box", c.curve_count}});
      if (c.found) got.push_back(c.curve);
      if (!c.found) failure = "no closed curve near a target at k = " + std::to_string(k);
      else if (tol > 0.0 && c.hausdorff > tol) failure = "Hausdorff distance above tolerance at k = " + std::to_string(k);
    }
    jr["linking_number"] = r.linked ? json(r.linking) : json(nullptr);
    if (!r.linking_error.empty()) jr["linking_error"] = r.linking_error;
    rep["realizations"].push_back(jr);
    run.emit_json("curves_k" + std::to_string(k) + ".json", io::to_json(got));
    run.emit_ply("curves_k" + std::to_string(k) + ".ply", io::to_ply(got));
  }
  rep["type"] = "NodalReport";
  run.results["realizations"] = rep["realizations"];
  run.emit_json("topology.json", rep, true);
  if (!failure.empty()) throw ToleranceError(failure);
}

void cmd_nodal(Run& run) {
  const auto& cfg = run.cfg();
  const auto kind = cfg.str("field");
  if (kind == "hopf") return cmd_nodal_hopf(run);
  nodal::Field f;
  helmholtz::BesselSum phi;
  spinor3::SpinorField3 psi;
  sphere::Chart chart;
  if (kind == "axis") {
    f = [](const Eigen::Vector3d& x) { return nodal::Complex(x(0), x(1)) * std::exp(nodal::Complex(0.0, x(2))); };
  } else if (kind == "bessel") {
    phi = load_bessel(cfg, inputs(cfg).at(0));
    if (phi.n != 3) throw ConfigError("field = bessel needs n = 3");
    f = [&](const Eigen::Vector3d& x) { return helmholtz::eval_bessel_sum(phi, x); };
  } else if (kind == "spinor") {
    psi = io::spinor_from_json(io::read_json(cfg.path(inputs(cfg).at(0))));
    const int a = cfg.integer("component");
    if (a != 0 && a != 1) throw ConfigError("key 'component': 0 or 1");
    const auto& src = psi.comp[psi.comp[0].terms.empty() ? 1 : 0];
    if (src.charts.empty()) throw ConfigError("spinor input carries no chart");
    chart = src.charts[0];
    f = [&, a](const Eigen::Vector3d& x) { return spinor3::eval_pullback(psi, chart, x)(a); };
  } else {
    throw ConfigError("key 'field': expected axis, bessel, spinor or hopf");
  }
  const double h = cfg.num("h");
  const auto ex = nodal::extract_nodal(f, parse_box(cfg), h);
  auto rep = topology(ex, f, h);
  rep["type"] = "NodalReport";
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : ex.curves) worst = std::min(worst, c.min_margin());
  run.results["curves"] = ex.curves.size();
  run.results["min_margin"] = ex.curves.empty() ? json(nullptr) : json(worst);
  run.emit_json("curves.json", io::to_json(ex.curves));
  run.emit_ply("curves.ply", io::to_ply(ex.curves));
  run.emit_json("topology.json", rep, true);
  const double need = cfg.num("min_margin");
  if (need > 0.0 && (ex.curves.empty() || worst < need)) {
    throw ToleranceError("stability margin " + io::fmt(worst) + " below " + io::fmt(need));
  }
}

void cmd_torus(Run& run) {
  const auto& cfg = run.cfg();
  const int n = cfg.integer("n");
  const int trials = cfg.integer("trials");
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  const bool loc = cfg.flag("localize");
  helmholtz::HerglotzDensity f;
  if (loc) f = helmholtz::HerglotzDensity::sample(n, builtin_density(cfg.str("density")), cfg.integer("degree"));
  std::string disc = "k,count,discrepancy\n";
  std::string lcsv = "k,count,discrepancy,max_angle,error,reference\n";
  json counts = json::object();
  for (int k : cfg.sweep("k")) {
    const auto s = torus::lattice_directions(n, k);
    counts[std::to_string(k)] = s.size();
    run.emit_json("lattice_k" + std::to_string(k) + ".json", io::to_json(s));
    if (s.size() == 0) {
      log("no directions of height " + std::to_string(k));
      disc += std::to_string(k) + ",0,\n";
      continue;
    }
    const double d = torus::cap_discrepancy(s, trials, seed);
    disc += std::to_string(k) + "," + std::to_string(s.size()) + "," + io::fmt(d) + "\n";
    if (loc) {
      torus::LocalizeOptions lo;
      lo.max_discrepancy = cfg.num("max_discrepancy");
      lo.discrepancy_trials = trials;
      lo.seed = seed;
      const auto r = torus::torus_localize(f, k, lo);
      check_finite(r.error, "localization error");
      lcsv += std::to_string(k) + "," + std::to_string(s.size()) + "," + io::fmt(r.discrepancy) + "," +
              io::fmt(r.max_angle) + "," + io::fmt(r.error) + "," + io::fmt(r.reference) + "\n";
      run.emit_json("torus_sum_k" + std::to_string(k) + ".json", io::to_json(r.u));
    }
  }
  run.results["counts"] = counts;
  run.emit_csv("discrepancy.csv", disc, true);
  if (loc) run.emit_csv("localization.csv", lcsv);
}

// ------------------------------------------------------------------ table

struct Command {
  std::string name, help;
  std::vector<Key> keys;
  void (*fn)(Run&);
};

std::vector<Command> commands() {
  const Key seed{"seed", "1", "seed for charts and sampling"};
  const Key chart{"chart", "random", "random (seeded frame) or left_invariant (n = 3)"};
  const Key base{"base", "", "base point(s) on S^n, e.g. 1,0,0,0; several separated by ';'"};
  return {
      {"approximate", "Herglotz density -> Bessel sum",
       {seed, {"input", "", "HerglotzDensity JSON (else a built-in density)"},
        {"density", "constant", "constant, linear or mixed"}, {"n", "3", "dimension"},
        {"degree", "80", "sphere rule degree"}, {"target", "0.01", "sup error target on the unit ball"},
        {"cell", "2.0", "sampling cell edge"}},
       cmd_approximate},
      {"synthesize", "Bessel sum(s) -> degree-k harmonics on S^n",
       {seed, chart, base, {"input", "", "BesselSum JSON file(s), comma separated"},
        {"k", "40", "degree or increasing comma list"}},
       cmd_synthesize},
      {"spinorize", "two components -> projected Dirac eigenspinor on S^3",
       {seed, chart, base, {"input", "", "two files (BesselSum or UltrasphericalSum JSON, or zero)"},
        {"k", "40", "degree"}},
       cmd_spinorize},
      {"verify", "localization errors across a k-sweep",
       {seed, chart, base, {"input", "", "BesselSum JSON"}, {"k", "40,80,160", "increasing degrees"},
        {"m", "2", "highest derivative order"}, {"h", "0.05", "starting difference step"},
        {"spinor", "false", "also project (Y, 0) and report the Dirac residual (n = 3)"},
        {"tolerance", "0", "fail when the order-0 error at the largest k exceeds this (0: off)"}},
       cmd_verify},
      {"nodal", "nodal curves, margins and linking numbers",
       {seed, {"field", "axis", "axis, bessel, spinor or hopf"}, {"input", "", "BesselSum or SpinorField3 JSON"},
        {"component", "0", "spinor component"}, {"box", "-1,-1,-1,1,1,1", "extraction box"},
        {"h", "0.1", "grid step"}, {"min_margin", "0", "fail below this stability margin (0: off)"},
        {"k", "60,120", "degrees for field = hopf"}, {"N", "100", "centers per component for field = hopf"},
        {"radius", "1.5", "Hopf circle radius"}, {"tolerance", "0", "Hausdorff tolerance for field = hopf (0: off)"}},
       cmd_nodal},
      {"torus", "lattice directions, cap discrepancy, torus localization",
       {seed, {"n", "3", "dimension"}, {"k", "3", "height or increasing comma list"},
        {"trials", "2000", "random caps"}, {"localize", "false", "also build torus eigenfunctions"},
        {"density", "constant", "constant, linear or mixed"}, {"degree", "20", "sphere rule degree"},
        {"max_discrepancy", "1", "reject sparser direction sets"}},
       cmd_torus},
  };
}

int fail(int code, const std::string& kind, const std::string& msg) {
  json e;
  e["error"] = {{"exit_code", code}, {"kind", kind}, {"message", msg}};
  std::cout << e.dump() << '\n';
  log(kind + ": " + msg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse localization experiments: Bessel sums, sphere harmonics, Dirac eigenspinors, nodal curves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("spinorloc ") + SPINORLOC_VERSION);
  const auto table = commands();
  struct Parsed {
    CLI::App* sub;
    std::string config, out;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> opts;
  };
  std::vector<Parsed> parsed(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& p = parsed[i];
    p.sub = app.add_subcommand(table[i].name, table[i].help);
    p.sub->set_help_flag("--help", "print this help");  // -h would clash with the step key h
    p.sub->add_option("--config", p.config, "key = value file");
    p.sub->add_option("--out", p.out, "output directory (default: primary output to stdout)");
    for (const auto& k : table[i].keys) {
      p.opts[k.name] = p.sub->add_option("--" + k.name, p.values[k.name], k.help + " [" + k.fallback + "]");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "config", e.what());
  }

  for (std::size_t i = 0; i < table.size(); ++i) {
    auto& p = parsed[i];
    if (!p.sub->parsed()) continue;
    const auto& c = table[i];
    try {
      Config cfg;
      for (const auto& k : c.keys) cfg.kv[k.name] = k.fallback;
      if (!p.config.empty()) read_config_file(p.config, cfg, c.keys);
      for (const auto& k : c.keys) {
        if (p.opts[k.name]->count() > 0) cfg.kv[k.name] = p.values[k.name];
      }
      const auto t0 = std::chrono::steady_clock::now();
      Run run(c.name, cfg, p.out);
      c.fn(run);
      run.finish();
      log(c.name + " done in " +
          std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s");
      return 0;
    } catch (const ConfigError& e) {
      return fail(2, "config", e.what());
    } catch (const io::FormatError& e) {
      return fail(2, "config", e.what());
    } catch (const std::invalid_argument& e) {
      return fail(2, "config", e.what());
    } catch (const ToleranceError& e) {
      return fail(3, "tolerance", e.what());
    } catch (const helmholtz::DiscretizationError& e) {
      return fail(3, "tolerance", std::string(e.what()) + " (achieved " + io::fmt(e.achieved()) + ")");
    } catch (const helmholtz::DesignError& e) {
      return fail(3, "tolerance", e.what());
    } catch (const torus::LocalizationError& e) {
      return fail(3, "tolerance", std::string(e.what()) + " (discrepancy " + io::fmt(e.discrepancy()) + ")");
    } catch (const std::exception& e) {
      return fail(4, "numerical", e.what());
    }
  }
  return fail(2, "config", "no command");
}
