#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "spinorloc/io.hpp"

namespace fs = std::filesystem;
using spinorloc::io::json;

namespace {

const fs::path tmp = fs::temp_directory_path() / "spinorloc_cli_test";

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  fs::create_directories(tmp);
  const auto out = tmp / "stdout.txt";
  const std::string cmd = std::string(SPINORLOC_CLI) + " " + args + " > " + out.string() + " 2> " +
                          (tmp / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, spinorloc::io::read_text(out.string())};
}

std::string data(const std::string& f) { return (fs::path(DATA_DIR) / f).string(); }

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(cell.empty() ? 0.0 : std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("verify on the bundled single-center example") {
  fs::remove_all(tmp);
  const auto a = run("verify --config " + data("verify_single_center.cfg") + " --out " + (tmp / "v1").string());
  REQUIRE(a.code == 0);
  const auto csv = spinorloc::io::read_text((tmp / "v1" / "verify.csv").string());
  const auto rows = csv_rows(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == 40);
  CHECK(rows[2][0] == 160);
  CHECK(rows[1][3] < rows[0][3]);
  CHECK(rows[2][3] < rows[1][3]);

  // identical config, different output directory: byte-identical files
  REQUIRE(run("verify --config " + data("verify_single_center.cfg") + " --out " + (tmp / "v2").string()).code == 0);
  for (const char* f : {"verify.csv", "manifest.json"}) {
    CHECK(spinorloc::io::read_text((tmp / "v1" / f).string()) == spinorloc::io::read_text((tmp / "v2" / f).string()));
  }
  const auto manifest = spinorloc::io::read_json((tmp / "v1" / "manifest.json").string());
  CHECK(manifest["seed"] == "1");
  CHECK(csv.find(manifest["inputs_hash"].get<std::string>()) != std::string::npos);
  CHECK(manifest["outputs"][0]["sha256"] == spinorloc::io::sha256_hex(csv));

  // a flag overrides the file and changes the inputs hash
  REQUIRE(run("verify --config " + data("verify_single_center.cfg") + " --k 40 --out " + (tmp / "v3").string()).code == 0);
  const auto m3 = spinorloc::io::read_json((tmp / "v3" / "manifest.json").string());
  CHECK(m3["config"]["k"] == "40");
  CHECK(m3["inputs_hash"] != manifest["inputs_hash"]);
}

TEST_CASE("nodal on the axis field and torus counts") {
  const auto r = run("nodal --config " + data("nodal_axis.cfg"));
  REQUIRE(r.code == 0);
  const auto topo = json::parse(r.out);
  REQUIRE(topo["curves"].size() == 1);
  CHECK(topo["curves"][0]["min_margin"].get<double>() >= 0.5);
  CHECK_FALSE(topo["curves"][0]["closed"].get<bool>());

  const auto t = run("torus --config " + data("torus_k3.cfg"));
  REQUIRE(t.code == 0);
  const auto rows = csv_rows(t.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == 3);
  CHECK(rows[0][1] == 30);
}

TEST_CASE("spinorize then extract the spinor nodal set") {
  const auto dir = tmp / "sp";
  REQUIRE(run("spinorize --input " + data("single_center.json") + ",zero --k 12 --chart left_invariant --out " +
              dir.string())
              .code == 0);
  const auto m = spinorloc::io::read_json((dir / "manifest.json").string());
  CHECK(m["results"]["dirac_residual"].get<double>() < 1e-10);
  const auto psi = spinorloc::io::spinor_from_json(spinorloc::io::read_json((dir / "spinor_k12.json").string()));
  CHECK(psi.k() == 12);
  const auto r = run("nodal --field spinor --input " + (dir / "spinor_k12.json").string() +
                     " --box -2,-2,-2,2,2,2 --h 0.2 --out " + (tmp / "ns").string());
  CHECK(r.code == 0);
  const auto curves = spinorloc::io::curves_from_json(spinorloc::io::read_json((tmp / "ns" / "curves.json").string()));
  CHECK(!curves.empty());
}

TEST_CASE("exit codes and error JSON") {
  auto expect = [](const Result& r, int code) {
    CHECK(r.code == code);
    const auto line = r.out.substr(r.out.rfind('{', r.out.find("\"error\"")));
    const auto e = json::parse(line);
    CHECK(e["error"]["exit_code"] == code);
  };
  expect(run("verify --config " + data("verify_single_center.cfg") + " --k 80,40"), 2);
  expect(run("torus --n 7"), 2);
  expect(run("nodal --field bogus"), 2);
  expect(run("spinorize --input zero,zero --k 3"), 2);
  expect(run("verify --input /nonexistent.json"), 2);
  expect(run("torus --bogus 1"), 2);
  fs::create_directories(tmp);
  spinorloc::io::write_text((tmp / "bad.cfg").string(), "k = 3\nnot_a_key = 1\n");
  expect(run("torus --config " + (tmp / "bad.cfg").string()), 2);
  expect(run("verify --config " + data("verify_single_center.cfg") + " --k 40 --tolerance 1e-9"), 3);
  expect(run("torus --k 1 --localize true --max_discrepancy 0.1"), 3);
  expect(run("nodal --config " + data("nodal_axis.cfg") + " --min_margin 2"), 3);
}
