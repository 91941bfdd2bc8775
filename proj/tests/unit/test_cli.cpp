#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "doctest.h"
#include "tasks.hpp"

using namespace vibronic::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int error_line(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const char* kBase = R"({
  "geometry": {"preset": "triangle"},
  "potential": {"type": "explicit", "kappa": -0.4, "xi": -0.05, "nu": 0.1},
  "params": {"omega": 1.0, "x0": 1.0, "detuning": "-V"}
})";

}  // namespace

TEST_CASE("line map of nested keys") {
  const auto lines = json_line_map("{\n \"a\": {\n  \"b\": [\n   1,\n   {\"c\": 2}\n  ]\n }\n}");
  CHECK(lines.at("/a") == 2);
  CHECK(lines.at("/a/b") == 3);
  CHECK(lines.at("/a/b/0") == 4);
  CHECK(lines.at("/a/b/1/c") == 5);
}

TEST_CASE("valid config resolves derived quantities") {
  const RunConfig c = parse_config(kBase, "cfg.json");
  CHECK(c.d == doctest::Approx(10.0));
  CHECK(c.geometry().size() == 3);
  CHECK(c.resolved()["params"]["detuning"] == "-V");
}

TEST_CASE("schema errors point at the offending line") {
  CHECK(error_line("{\n \"geometry\": {\"preset\": \"triangle\"},\n \"potential\": {\"kappa\": 1},\n"
                   " \"params\": {\n  \"omega\": -1\n }\n}") == 5);
  CHECK(error_line("{\n \"geometry\": {\"preset\": \"triangle\"},\n \"potential\": {},\n"
                   " \"params\": {\"nu\": 0.1},\n \"colour\": 3\n}") == 5);
  CHECK(error_line("{\n \"geometry\": {\"preset\": \"square\"}\n}") == 2);
  CHECK(error_line("{\n \"geometry\": {\"preset\": \"triangle\"},\n \"potential\": {},\n"
                   " \"params\": {\"nu\": 0.1},\n \"scan\": {\"start\": 0, \"stop\": 1,\n   \"samples\": 0}\n}") == 6);
  CHECK(error_line("{\n \"geometry\": {\n") == 3);
  CHECK(error_line("{\n \"geometry\": {\"preset\": \"custom\", \"positions\": [[0,0,0],\n   [0,0]]}\n}") == 3);
  try {
    parse_config("{\n \"geometry\": {\"preset\": \"triangle\"},\n \"potential\": {},\n \"params\": {\"omega\": \"x\", \"nu\": 0.1}\n}",
                 "my.json");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "my.json:4: params.omega: expected a number");
  }
}

TEST_CASE("graph task writes the artifacts and a manifest") {
  RunConfig c = parse_config(kBase, "cfg.json");
  c.task = "graph";
  c.out_dir = "cli_graph";
  std::ostringstream log;
  REQUIRE(run(c, log) == kOk);
  CHECK(slurp("cli_graph/graph_edges.txt") == "0 2\n0 4\n1 2\n1 5\n3 4\n3 5\n");
  const Json m = Json::parse(slurp("cli_graph/run_manifest.json"));
  CHECK(m["summary"]["topology"] == "ring");
  CHECK(m["summary"]["modes"] == 4);
  CHECK(m["derived"]["seed"] == "001");
}

TEST_CASE("scans flag rows beyond criticality and keep going") {
  RunConfig c = parse_config(R"({
    "geometry": {"preset": "dumbbell"},
    "potential": {"type": "explicit", "kappa": 0.2, "nu": 0.1},
    "params": {},
    "scan": {"start": 0.5, "stop": 1.5, "samples": 3},
    "solver": {"block": "pair", "max_cutoff": 64}
  })",
                             "cfg.json");
  c.task = "gs-scan-xi";
  c.out_dir = "cli_scan";
  std::ostringstream log;
  REQUIRE(run(c, log) == kOk);
  std::istringstream csv(slurp("cli_scan/gs_scan_xi.csv"));
  std::string header, ok, edge, beyond;
  std::getline(csv, header);
  std::getline(csv, ok);
  std::getline(csv, edge);
  std::getline(csv, beyond);
  CHECK(header == "xi,xi_bar,kappa,kappa_bar,Omega,E_numeric,E_analytic,E_BO,cutoff,converged,status");
  CHECK(ok.find(",true,converged") != std::string::npos);
  CHECK(edge.find("unstable") != std::string::npos);
  CHECK(beyond.find(",unstable,unstable,64,false,max_cutoff") != std::string::npos);
}

TEST_CASE("unknown tasks print usage") {
  RunConfig c = parse_config(kBase, "cfg.json");
  c.task = "plot";
  c.out_dir = "cli_usage";
  std::ostringstream log;
  CHECK(run(c, log) == kUsage);
  CHECK(log.str().find("usage:") != std::string::npos);
}
