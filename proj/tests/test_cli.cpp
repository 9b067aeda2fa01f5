// End-to-end checks of the command-line tool: spawns the real binary and
// inspects exit codes and emitted files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(ORBITFORGE_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
#ifdef WEXITSTATUS
  return WEXITSTATUS(status);
#else
  return status;
#endif
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

const char* kCircleConfig = R"({
  "n": 2, "dim": 2, "T": 4.0,
  "mode": "loop", "symmetry": "choreography",
  "modes": 4, "starts": 2, "seed": 3, "amplitude": 0.8,
  "options": {"gtol": 1e-8, "max_iterations": 1500}
})";

}  // namespace

TEST_CASE("solve is deterministic and round-trips through verify/plot/eval") {
  write_file("cli_cfg.json", kCircleConfig);

  CHECK(run("solve --config cli_cfg.json --out cli_orbit.json > cli_solve.log") == 0);
  const std::string first = slurp("cli_orbit.json");

  CHECK(run("solve --config cli_cfg.json --out cli_orbit2.json > /dev/null") == 0);
  CHECK(slurp("cli_orbit2.json") == first);  // byte-identical reruns

  CHECK(run("verify cli_orbit.json > cli_verify.log") == 0);
  const std::string verify_log = slurp("cli_verify.log");
  CHECK(verify_log.find("closure_error") != std::string::npos);
  CHECK(verify_log.find("PASS") != std::string::npos);

  CHECK(run("action-eval cli_orbit.json > cli_eval.log") == 0);
  CHECK(slurp("cli_eval.log").find("action") != std::string::npos);

  CHECK(run("plot cli_orbit.json --out cli_plot > /dev/null") == 0);
  const std::string csv = slurp("cli_plot.csv");
  CHECK(csv.find("t,body,x,y") != std::string::npos);
  const std::string svg = slurp("cli_plot.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);

  for (const char* f : {"cli_cfg.json", "cli_orbit.json", "cli_orbit2.json",
                        "cli_solve.log", "cli_verify.log", "cli_eval.log",
                        "cli_plot.csv", "cli_plot.svg"})
    std::remove(f);
}

TEST_CASE("input errors exit with code 2") {
  write_file("cli_bad.json", R"({"n": 2, "dim": 2, "symmetry": "d6_eight"})");
  CHECK(run("solve --config cli_bad.json 2> /dev/null") == 2);
  std::remove("cli_bad.json");

  write_file("cli_corrupt.json", "{ not json");
  CHECK(run("verify cli_corrupt.json 2> /dev/null") == 2);
  std::remove("cli_corrupt.json");

  CHECK(run("verify no_such_file.json 2> /dev/null") == 2);
}

TEST_CASE("marchal demo table") {
  CHECK(run("marchal-demo --dim 3 --halvings 2 --out cli_demo.csv > /dev/null") ==
        0);
  const std::string csv = slurp("cli_demo.csv");
  CHECK(csv.find("rho,t0,action") != std::string::npos);
  // Header plus three rungs.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  std::remove("cli_demo.csv");
}

TEST_CASE("p12 sweep") {
  SUBCASE("empty grid emits just the header and exits 0") {
    CHECK(run("sweep-p12 --count 0 --out cli_sweep0.csv > /dev/null") == 0);
    const std::string csv = slurp("cli_sweep0.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    std::remove("cli_sweep0.csv");
  }

  SUBCASE("a single row stays below its bound") {
    CHECK(run("sweep-p12 --count 1 --u-min 0.35 --u-max 0.35 --nodes 64 "
              "--out cli_sweep.csv > /dev/null") == 0);
    const std::string csv = slurp("cli_sweep.csv");
    std::istringstream ss(csv);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    double u, act, bound;
    char c;
    std::istringstream rs(row);
    rs >> u >> c >> act >> c >> bound;
    CHECK(u == doctest::Approx(0.35));
    CHECK(act <= bound * (1.0 + 1e-3));
    std::remove("cli_sweep.csv");
  }
}
