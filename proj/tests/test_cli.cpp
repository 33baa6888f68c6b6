#include "lrk/cli.hpp"
#include "lrk/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

using namespace lrk;
using lrk::testing::TempDir;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path_str(const std::filesystem::path& p) { return p.string(); }

/// Data rows of a CSV, header dropped.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string body(const std::string& csv) { return csv.substr(csv.find('\n') + 1); }

}  // namespace

TEST_CASE("alpha parsing") {
  CHECK(cli::parse_alpha("2") == 2.0);
  CHECK(cli::parse_alpha("2/3") == 2.0 / 3.0);
  CHECK(cli::parse_alpha("0.25") == 0.25);
  CHECK_THROWS_AS(cli::parse_alpha("abc"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_alpha("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_alpha("-1"), std::invalid_argument);
  CHECK_THROWS_AS(cli::parse_alpha(""), std::invalid_argument);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"lanczos", "--no-such-flag"}).code == cli::kExitUsage);
  CHECK(invoke({"lanczos", "--n", "abc"}).code == cli::kExitUsage);
  CHECK(invoke({"lanczos", "--theta", "1", "--theta-pi", "0.3"}).code == cli::kExitUsage);
  CHECK(invoke({"lanczos", "--alpha", "0"}).code == cli::kExitUsage);
  CHECK(invoke({"lanczos", "--n", "1"}).code == cli::kExitUsage);
  CHECK(invoke({"--help"}).code == cli::kExitOk);
}

TEST_CASE("spectrum command") {
  TempDir dir("cli_spectrum");
  const Outcome r = invoke({"spectrum", "--n", "200", "--epsilon", "-0.2", "--alpha", "3", "--alpha", "1/3",
                            "--theta-points", "101", "--out", path_str(dir.path())});
  REQUIRE(r.code == 0);
  const auto a3 = csv_rows(read_file(dir.path() / "spectrum_alpha3.csv"));
  const auto a13 = csv_rows(read_file(dir.path() / "spectrum_alpha1_3.csv"));
  CHECK(a3.size() == 101 * 200);
  CHECK(a13.size() == 101 * 200);
  CHECK(std::filesystem::exists(dir.path() / "manifest.json"));

  // Lowest normalized energy per theta.
  auto lowest = [](const std::vector<std::vector<std::string>>& rows) {
    std::map<double, double> out;
    for (const auto& row : rows)
      if (row[1] == "0") out[std::stod(row[0])] = std::stod(row[3]);
    return out;
  };
  const auto g3 = lowest(a3);
  const auto g13 = lowest(a13);
  CHECK(g3.size() == 101);
  // alpha = 3: gapless window around theta/pi = 0.5.
  CHECK(g3.at(0.5) < 1e-3);
  int window = 0;
  for (const auto& [t, e] : g3)
    if (e < 1e-3) {
      CHECK(t > 0.2);
      CHECK(t < 0.8);
      ++window;
    }
  CHECK(window >= 3);
  // alpha = 1/3: the gap exceeds the alpha = 3 value across most of the scan.
  int larger = 0;
  for (const auto& [t, e] : g3)
    if (g13.at(t) > e) ++larger;
  CHECK(larger > 0.5 * g3.size());
}

TEST_CASE("lanczos command and seeds") {
  TempDir dir("cli_lanczos");
  REQUIRE(invoke({"lanczos", "--n", "30", "--seed", "gamma1", "--out", path_str(dir.path())}).code == 0);
  for (const char* f : {"lanczos_majorana.json", "lanczos_nambu.json", "lanczos.csv", "manifest.json"})
    CHECK(std::filesystem::exists(dir.path() / f));
  const json rec = json::parse(read_file(dir.path() / "lanczos_majorana.json"));
  CHECK(rec.at("seed") == "gamma1");
  CHECK(rec.at("representation") == "majorana");
  // v0 = e1: the first coefficient is the norm of the first column of HM.
  const CouplingMatrices c = build_coupling_matrices({30, 2.0, 0.4 * std::numbers::pi, -0.2});
  const double b1 = build_majorana_generator(c).matrix.col(0).norm();
  CHECK(rec.at("b")[0].get<double>() == doctest::Approx(b1).epsilon(1e-13));

  TempDir pair("cli_lanczos_pair");
  REQUIRE(invoke({"lanczos", "--n", "30", "--seed", "gamma1+gamma2", "--out", path_str(pair.path())}).code == 0);
  const json rp = json::parse(read_file(pair.path() / "lanczos_majorana.json"));
  CHECK(rp.at("seed") == "gamma1+gamma2");
  const LanczosRun ref = lanczos_majorana(build_majorana_generator(c), SeedSpec::edge_pair());
  CHECK(rp.at("b").get<std::vector<double>>() == ref.b);

  const Outcome bad = invoke({"lanczos", "--seed", "delta7", "--out", path_str(dir.path())});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("seed") != std::string::npos);
  CHECK(invoke({"lanczos", "--n", "5", "--seed", "gamma11"}).code == cli::kExitUsage);

  TempDir single("cli_lanczos_single");
  REQUIRE(invoke({"lanczos", "--n", "20", "--representation", "nambu", "--out", path_str(single.path())}).code == 0);
  CHECK(std::filesystem::exists(single.path() / "lanczos_nambu.json"));
  CHECK_FALSE(std::filesystem::exists(single.path() / "lanczos_majorana.json"));
}

TEST_CASE("diagnose command from parameters and from a record") {
  TempDir dir("cli_diag");
  REQUIRE(invoke({"diagnose", "--n", "100", "--alpha", "2", "--theta-pi", "0.4", "--out", path_str(dir.path())}).code == 0);
  const json s = json::parse(read_file(dir.path() / "summary.json"));
  CHECK(s.at("n_cross").get<int>() >= 1);
  CHECK(s.at("krylov_phase") == "edge");
  CHECK(read_file(dir.path() / "staggering.csv").rfind("n,eta_n,s_n\n", 0) == 0);

  TempDir lz("cli_diag_lz");
  REQUIRE(invoke({"lanczos", "--n", "100", "--alpha", "2", "--theta-pi", "0.1", "--out", path_str(lz.path())}).code == 0);
  TempDir dg("cli_diag_in");
  REQUIRE(invoke({"diagnose", "--input", path_str(lz.path() / "lanczos_majorana.json"), "--out", path_str(dg.path())})
              .code == 0);
  const json s2 = json::parse(read_file(dg.path() / "summary.json"));
  CHECK(s2.at("n_cross") == 0);
  CHECK(s2.at("params").at("n_sites") == 100);

  CHECK(invoke({"diagnose", "--input", path_str(dg.path() / "missing.json"), "--out", path_str(dg.path())}).code ==
        cli::kExitUsage);
  CHECK(invoke({"diagnose", "--n", "100", "--n-max", "500", "--out", path_str(dg.path())}).code == cli::kExitUsage);
}

TEST_CASE("sweep command: timing, determinism, resume") {
  TempDir a("cli_sweep_a"), b("cli_sweep_b"), c("cli_sweep_c");
  const std::vector<std::string> base{"sweep", "--n", "20", "--alpha-points", "3", "--theta-points", "3"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return invoke(args);
  };

  const auto start = std::chrono::steady_clock::now();
  REQUIRE(with({"--workers", "1", "--out", path_str(a.path())}).code == 0);
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
  REQUIRE(with({"--workers", "4", "--out", path_str(b.path())}).code == 0);
  const std::string csv_a = read_file(a.path() / "phase_diagram.csv");
  CHECK(csv_rows(csv_a).size() == 9);
  CHECK(body(csv_a) == body(read_file(b.path() / "phase_diagram.csv")));
  CHECK(std::filesystem::exists(a.path() / "checkpoint.jsonl"));
  CHECK(std::filesystem::exists(a.path() / "agreement.json"));
  const json manifest = json::parse(read_file(a.path() / "manifest.json"));
  CHECK(manifest.at("config").at("grid").at("n_sites") == 20);

  REQUIRE(with({"--out", path_str(c.path()), "--workers", "2", "--max-new-points", "5"}).code == 0);
  const Outcome resumed = with({"--out", path_str(c.path()), "--workers", "2", "--resume"});
  REQUIRE(resumed.code == 0);
  CHECK(resumed.out.find("4 computed, 5 resumed") != std::string::npos);
  CHECK(read_file(c.path() / "phase_diagram.csv") == csv_a);

  const Outcome again = with({"--out", path_str(a.path()), "--resume"});
  CHECK(again.out.find("0 computed, 9 resumed") != std::string::npos);

  const Outcome mismatch = invoke({"sweep", "--n", "22", "--alpha-points", "3", "--theta-points", "3", "--resume",
                                   "--out", path_str(a.path())});
  CHECK(mismatch.code == cli::kExitUsage);
}

TEST_CASE("config file precedence") {
  TempDir dir("cli_config");
  const auto cfg = dir.path() / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "# sweep settings\nn = 16\nalpha-points = 2\ntheta-points = 2\nepsilon = 0.5\nthresholds = 0.05,0.1,0.5\n";
  }
  REQUIRE(invoke({"sweep", "--config", path_str(cfg), "--n", "18", "--out", path_str(dir.path() / "o")}).code == 0);
  const json grid = json::parse(read_file(dir.path() / "o" / "manifest.json")).at("config").at("grid");
  CHECK(grid.at("n_sites") == 18);
  CHECK(grid.at("epsilon") == 0.5);
  CHECK(grid.at("alpha_points") == 2);

  {
    std::ofstream out(dir.path() / "bad.cfg");
    out << "no_such_key = 3\n";
  }
  CHECK(invoke({"sweep", "--config", path_str(dir.path() / "bad.cfg")}).code == cli::kExitUsage);
  CHECK(invoke({"sweep", "--config", path_str(dir.path() / "absent.cfg")}).code == cli::kExitUsage);
}

TEST_CASE("worker count from the environment") {
  TempDir dir("cli_env");
  ::setenv(cli::kWorkersEnv, "3", 1);
  CHECK(invoke({"sweep", "--n", "12", "--alpha-points", "2", "--theta-points", "2", "--out", path_str(dir.path())})
            .code == 0);
  ::setenv(cli::kWorkersEnv, "zero", 1);
  CHECK(invoke({"sweep", "--n", "12", "--alpha-points", "2", "--theta-points", "2", "--out", path_str(dir.path())})
            .code == cli::kExitUsage);
  // The flag wins over the environment.
  CHECK(invoke({"sweep", "--n", "12", "--alpha-points", "2", "--theta-points", "2", "--workers", "2", "--out",
                path_str(dir.path())})
            .code == 0);
  ::unsetenv(cli::kWorkersEnv);
}

TEST_CASE("oracle command") {
  const Outcome r = invoke({"oracle"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(invoke({"oracle", "--n", "5"}).code == cli::kExitUsage);
  const Outcome j = invoke({"oracle", "--n", "4", "--seed", "gamma1+gamma2", "--json"});
  CHECK(j.code == 0);
  const json report = json::parse(j.out);
  CHECK(report.at("passed") == true);
  CHECK(report.at("krylov_dimension").get<int>() <= 8);
}
