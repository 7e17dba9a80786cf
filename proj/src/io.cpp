#include "spinorloc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace spinorloc::io {

namespace {

using Complex = std::complex<double>;

json cplx(Complex z) { return json::array({z.real(), z.imag()}); }

Complex cplx_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vec_from(const json& j) {
  if (!j.is_array()) throw FormatError("vector must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json mat2(const spinor3::Mat2& m) {
  return json::array({json::array({cplx(m(0, 0)), cplx(m(0, 1))}), json::array({cplx(m(1, 0)), cplx(m(1, 1))})});
}

spinor3::Mat2 mat2_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2) throw FormatError("2x2 matrix expected");
  spinor3::Mat2 m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(r, c) = cplx_from(j[r][c]);
  return m;
}

void expect_type(const json& j, const char* type) {
  if (!j.is_object() || !j.contains("type") || j["type"] != type) {
    throw FormatError(std::string("expected a JSON object with \"type\": \"") + type + "\"");
  }
}

// nlohmann's type errors become FormatError so callers see one exception kind
template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

json to_json(const helmholtz::HerglotzDensity& f) {
  json j;
  j["type"] = "HerglotzDensity";
  j["n"] = f.n;
  j["degree"] = f.degree;
  j["nodes"] = json::array();
  for (Eigen::Index q = 0; q < f.nodes.cols(); ++q) j["nodes"].push_back(vec(f.nodes.col(q)));
  j["weights"] = f.weights;
  j["values"] = json::array();
  for (auto v : f.values) j["values"].push_back(cplx(v));
  return j;
}

helmholtz::HerglotzDensity herglotz_from_json(const json& j) {
  expect_type(j, "HerglotzDensity");
  return guarded([&] {
    helmholtz::HerglotzDensity f;
    f.n = j.at("n").get<int>();
    f.degree = j.value("degree", 0);
    const auto& nodes = j.at("nodes");
    f.nodes.resize(f.n, static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const auto v = vec_from(nodes[q]);
      if (v.size() != f.n) throw FormatError("node dimension differs from n");
      f.nodes.col(static_cast<Eigen::Index>(q)) = v;
    }
    f.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& v : j.at("values")) f.values.push_back(cplx_from(v));
    f.validate();
    return f;
  });
}

json to_json(const helmholtz::BesselSum& s) {
  json j;
  j["type"] = "BesselSum";
  j["n"] = s.n;
  j["R"] = s.R;
  j["terms"] = json::array();
  for (const auto& t : s.terms) j["terms"].push_back({{"c", cplx(t.c)}, {"x", vec(t.x)}});
  return j;
}

helmholtz::BesselSum bessel_sum_from_json(const json& j) {
  expect_type(j, "BesselSum");
  return guarded([&] {
    helmholtz::BesselSum s;
    s.n = j.at("n").get<int>();
    for (const auto& t : j.at("terms")) s.terms.push_back({cplx_from(t.at("c")), vec_from(t.at("x"))});
    s.R = j.contains("R") ? j["R"].get<double>() : s.enclosing_radius();
    s.validate();
    return s;
  });
}

json to_json(const sphere::Chart& c) {
  json j;
  j["type"] = "Chart";
  j["base"] = vec(c.base().vec());
  j["frame"] = json::array();
  for (Eigen::Index i = 0; i < c.frame().cols(); ++i) j["frame"].push_back(vec(c.frame().col(i)));
  j["seed"] = c.seed();
  return j;
}

sphere::Chart chart_from_json(const json& j) {
  expect_type(j, "Chart");
  return guarded([&] {
    const auto base = vec_from(j.at("base"));
    const auto& cols = j.at("frame");
    Eigen::MatrixXd frame(base.size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto v = vec_from(cols[i]);
      if (v.size() != base.size()) throw FormatError("frame column dimension");
      frame.col(static_cast<Eigen::Index>(i)) = v;
    }
    const auto seed = j.value("seed", std::uint64_t{0});
    if (seed == 0) return sphere::Chart(sphere::SpherePoint(base), frame);
    // seeded frames are regenerated so the seed survives the round trip
    auto c = sphere::Chart::random(sphere::SpherePoint(base), seed);
    if ((c.frame() - frame).cwiseAbs().maxCoeff() > 1e-14) throw FormatError("chart frame does not match its seed");
    return c;
  });
}

json to_json(const harmonics::UltrasphericalSum& y) {
  json j;
  j["type"] = "UltrasphericalSum";
  j["n"] = y.n;
  j["k"] = y.k;
  j["norm"] = y.norm;
  j["terms"] = json::array();
  for (const auto& t : y.terms) j["terms"].push_back({{"c", cplx(t.c)}, {"p", vec(t.p.vec())}});
  j["charts"] = json::array();
  for (const auto& c : y.charts) j["charts"].push_back(to_json(c));
  return j;
}

harmonics::UltrasphericalSum ultraspherical_from_json(const json& j) {
  expect_type(j, "UltrasphericalSum");
  return guarded([&] {
    harmonics::UltrasphericalSum y;
    y.n = j.at("n").get<int>();
    y.k = j.at("k").get<int>();
    y.norm = j.contains("norm") ? j["norm"].get<double>() : harmonics::kernel_normalization(y.n);
    for (const auto& t : j.at("terms")) y.terms.push_back({cplx_from(t.at("c")), sphere::SpherePoint(vec_from(t.at("p")))});
    if (j.contains("charts"))
      for (const auto& c : j["charts"]) y.charts.push_back(chart_from_json(c));
    // an empty sum is the zero component of a spinor
    if (!y.terms.empty()) y.validate();
    return y;
  });
}

json to_json(const spinor3::SpinorField3& psi) {
  json j;
  j["type"] = "SpinorField3";
  j["orientation"] = psi.cliff.orientation;
  j["gamma"] = json::array();
  for (const auto& g : psi.cliff.gamma) j["gamma"].push_back(mat2(g));
  j["components"] = json::array({to_json(psi.comp[0]), to_json(psi.comp[1])});
  j["words"] = json::array();
  for (const auto& w : psi.words) j["words"].push_back({{"letters", w.letters}, {"M", mat2(w.M)}});
  return j;
}

spinor3::SpinorField3 spinor_from_json(const json& j) {
  expect_type(j, "SpinorField3");
  return guarded([&] {
    spinor3::SpinorField3 psi;
    if (j.contains("gamma")) {
      const auto& g = j["gamma"];
      if (g.size() != 3) throw FormatError("gamma must hold three matrices");
      psi.cliff = spinor3::CliffordRep3::oriented({mat2_from(g[0]), mat2_from(g[1]), mat2_from(g[2])});
    }
    const int orient = j.value("orientation", 1);
    if (orient != 1 && orient != -1) throw FormatError("orientation must be +1 or -1");
    psi.cliff.orientation = orient;
    const auto& comps = j.at("components");
    if (comps.size() != 2) throw FormatError("a spinor has two components");
    psi.comp[0] = ultraspherical_from_json(comps[0]);
    psi.comp[1] = ultraspherical_from_json(comps[1]);
    for (const auto& w : j.at("words")) {
      spinor3::SpinorField3::Word word;
      word.letters = w.at("letters").get<std::vector<int>>();
      for (int l : word.letters)
        if (l < 0 || l > 2) throw FormatError("word letters are 0, 1 or 2");
      word.M = mat2_from(w.at("M"));
      psi.words.push_back(std::move(word));
    }
    return psi;
  });
}

json to_json(const torus::LatticeDirectionSet& s) {
  json j;
  j["type"] = "LatticeDirectionSet";
  j["n"] = s.n;
  j["k"] = s.k;
  j["m"] = json::array();
  for (Eigen::Index c = 0; c < s.m.cols(); ++c) {
    json col = json::array();
    for (int i = 0; i < s.n; ++i) col.push_back(s.m(i, c));
    j["m"].push_back(col);
  }
  return j;
}

torus::LatticeDirectionSet lattice_from_json(const json& j) {
  expect_type(j, "LatticeDirectionSet");
  return guarded([&] {
    torus::LatticeDirectionSet s;
    s.n = j.at("n").get<int>();
    s.k = j.at("k").get<int>();
    const auto& m = j.at("m");
    s.m.resize(s.n, static_cast<Eigen::Index>(m.size()));
    for (std::size_t c = 0; c < m.size(); ++c) {
      if (m[c].size() != static_cast<std::size_t>(s.n)) throw FormatError("lattice point dimension");
      for (int i = 0; i < s.n; ++i) s.m(i, static_cast<Eigen::Index>(c)) = m[c][i].get<int>();
    }
    s.validate();
    return s;
  });
}

json to_json(const torus::TorusSum& u) {
  json j;
  j["type"] = "TorusSum";
  j["convention"] = "u(x) = sum_j c_j exp(2 pi i m_j . x) on R^n / Z^n";
  j["n"] = u.n;
  j["k"] = u.k;
  j["m"] = json::array();
  j["c"] = json::array();
  for (std::size_t i = 0; i < u.m.size(); ++i) {
    j["m"].push_back(std::vector<int>(u.m[i].data(), u.m[i].data() + u.m[i].size()));
    j["c"].push_back(cplx(u.c[i]));
  }
  return j;
}

json to_json(const std::vector<nodal::NodalCurve>& curves) {
  json j;
  j["type"] = "NodalCurves";
  j["curves"] = json::array();
  for (const auto& c : curves) {
    json jc;
    jc["closed"] = c.closed;
    jc["vertices"] = json::array();
    for (const auto& v : c.vertices) jc["vertices"].push_back(vec(v));
    jc["margins"] = c.margins;
    j["curves"].push_back(jc);
  }
  return j;
}

std::vector<nodal::NodalCurve> curves_from_json(const json& j) {
  expect_type(j, "NodalCurves");
  return guarded([&] {
    std::vector<nodal::NodalCurve> out;
    for (const auto& jc : j.at("curves")) {
      nodal::NodalCurve c;
      c.closed = jc.at("closed").get<bool>();
      for (const auto& v : jc.at("vertices")) {
        const auto x = vec_from(v);
        if (x.size() != 3) throw FormatError("curve vertices live in R^3");
        c.vertices.push_back(x);
      }
      c.margins = jc.value("margins", std::vector<double>{});
      out.push_back(std::move(c));
    }
    return out;
  });
}

std::string to_ply(const std::vector<nodal::NodalCurve>& curves) {
  std::size_t nv = 0, ne = 0;
  for (const auto& c : curves) {
    nv += c.vertices.size();
    if (c.vertices.size() > 1) ne += c.vertices.size() - (c.closed ? 0 : 1);
  }
  std::ostringstream os;
  os << "ply\nformat ascii 1.0\ncomment nodal curves, chart coordinates\n";
  os << "element vertex " << nv << "\nproperty double x\nproperty double y\nproperty double z\n";
  os << "element edge " << ne << "\nproperty int vertex1\nproperty int vertex2\nend_header\n";
  for (const auto& c : curves)
    for (const auto& v : c.vertices) os << fmt(v(0)) << ' ' << fmt(v(1)) << ' ' << fmt(v(2)) << '\n';
  std::size_t base = 0;
  for (const auto& c : curves) {
    const std::size_t m = c.vertices.size();
    if (m > 1) {
      for (std::size_t i = 0; i + 1 < m; ++i) os << base + i << ' ' << base + i + 1 << '\n';
      if (c.closed) os << base + m - 1 << ' ' << base << '\n';
    }
    base += m;
  }
  return os.str();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace spinorloc::io
