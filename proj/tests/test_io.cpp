#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "spinorloc/io.hpp"

using namespace spinorloc;
using io::json;

namespace {

helmholtz::BesselSum sample_sum() {
  helmholtz::BesselSum s;
  s.n = 3;
  s.terms.push_back({{0.1, -2.0 / 3.0}, Eigen::Vector3d(0.3, 1.0 / 7.0, -0.2)});
  s.terms.push_back({{1e-300, 3.0}, Eigen::Vector3d(-1.1, 0.0, 0.4)});
  s.R = s.enclosing_radius();
  return s;
}

// parse the dumped text again: the disk round trip
json reparse(const json& j) { return json::parse(io::dump(j)); }

}  // namespace

TEST_CASE("BesselSum and Herglotz round trips are exact") {
  const auto s = sample_sum();
  const auto r = io::bessel_sum_from_json(reparse(io::to_json(s)));
  REQUIRE(r.terms.size() == s.terms.size());
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    CHECK(r.terms[i].c == s.terms[i].c);
    CHECK(r.terms[i].x == s.terms[i].x);
  }
  CHECK(r.R == s.R);

  const auto f = helmholtz::HerglotzDensity::sample(
      3, [](const Eigen::VectorXd& x) { return helmholtz::Complex(x(0), x(1) * x(2)); }, 6);
  const auto g = io::herglotz_from_json(reparse(io::to_json(f)));
  CHECK(g.nodes == f.nodes);
  CHECK(g.weights == f.weights);
  CHECK(g.values == f.values);
  CHECK(g.degree == f.degree);
}

TEST_CASE("chart, ultraspherical sum and spinor round trips") {
  const auto chart = sphere::Chart::random(sphere::SpherePoint(Eigen::Vector4d(0, 0.6, 0, 0.8)), 11);
  const auto c2 = io::chart_from_json(reparse(io::to_json(chart)));
  CHECK(c2.base().vec() == chart.base().vec());
  CHECK(c2.frame() == chart.frame());

  const auto y = harmonics::synthesize(sample_sum(), 12, chart);
  const auto y2 = io::ultraspherical_from_json(reparse(io::to_json(y)));
  const Eigen::Vector4d p = Eigen::Vector4d(0.1, 0.2, -0.3, 0.9).normalized();
  CHECK(harmonics::eval(y2, p) == harmonics::eval(y, p));
  CHECK(y2.charts.size() == 1);

  const auto psi = spinor3::dirac_project(spinor3::SpinorField3::from_components(y, y), 12);
  const auto psi2 = io::spinor_from_json(reparse(io::to_json(psi)));
  CHECK(spinor3::eval(psi2, p) == spinor3::eval(psi, p));
  CHECK(psi2.cliff.orientation == psi.cliff.orientation);
  CHECK(io::to_json(psi2) == io::to_json(psi));

  // an empty component survives
  harmonics::UltrasphericalSum zero;
  zero.k = 12;
  zero.norm = harmonics::kernel_normalization(3);
  const auto half = spinor3::SpinorField3::from_components(y, zero);
  CHECK(io::spinor_from_json(reparse(io::to_json(half))).comp[1].terms.empty());
}

TEST_CASE("lattice, curves and PLY") {
  const auto s = torus::lattice_directions(3, 3);
  const auto j = io::to_json(s);
  CHECK(j["m"].size() == 30);
  CHECK(io::lattice_from_json(reparse(j)).m == s.m);
  json bad = j;
  bad["m"][0][0] = 7;
  CHECK_THROWS_AS(io::lattice_from_json(bad), io::FormatError);

  nodal::NodalCurve open{{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(1, 1, 0)}, false, {1, 1, 1}};
  nodal::NodalCurve loop{nodal::circle(Eigen::Vector3d::Zero(), 0.5, Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), 5),
                         true, {0.5, 0.5, 0.5, 0.5, 0.5}};
  const std::vector<nodal::NodalCurve> curves{open, loop};
  const auto back = io::curves_from_json(reparse(io::to_json(curves)));
  REQUIRE(back.size() == 2);
  CHECK_FALSE(back[0].closed);
  CHECK(back[1].closed);
  CHECK(back[1].vertices[3] == loop.vertices[3]);
  CHECK(back[1].margins == loop.margins);

  const auto ply = io::to_ply(curves);
  std::istringstream in(ply);
  std::string line;
  int vertices = -1, edges = -1, body = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      if (line.rfind("element vertex ", 0) == 0) vertices = std::atoi(line.c_str() + 15);
      if (line.rfind("element edge ", 0) == 0) edges = std::atoi(line.c_str() + 13);
      if (line == "end_header") header = false;
    } else {
      ++body;
    }
  }
  CHECK(vertices == 8);
  CHECK(edges == 2 + 5);
  CHECK(body == vertices + edges);
}

TEST_CASE("formatting, hashing and malformed input") {
  CHECK(io::fmt(0.1) == "0.10000000000000001");
  CHECK(std::strtod(io::fmt(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
  // FIPS 180-2 test vector
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(io::bessel_sum_from_json(json{{"type", "Chart"}}), io::FormatError);
  CHECK_THROWS_AS(io::bessel_sum_from_json(json{{"type", "BesselSum"}, {"n", 3}}), io::FormatError);
  CHECK_THROWS_AS(io::bessel_sum_from_json(json{{"type", "BesselSum"}, {"n", 3}, {"terms", json::array()}}),
                  io::FormatError);
  CHECK_THROWS_AS(io::read_json("/nonexistent/file.json"), io::FormatError);
}
