#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef BAYESBENCH_CLI
#error "BAYESBENCH_CLI must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const auto base = fs::temp_directory_path() / ("bb_cli_" + std::to_string(counter++));
  const std::string out_path = base.string() + ".out";
  const std::string err_path = base.string() + ".err";
  const std::string cmd = env_prefix + std::string(BAYESBENCH_CLI) + " " + args +
                          " >" + out_path + " 2>" + err_path;
  const int rc = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return res;
}

std::string write_toy_csv() {
  const auto path = fs::temp_directory_path() / "bb_cli_toy.csv";
  std::ofstream out(path);
  out << "x,label\n0.0,a\n1.0,a\n0.5,b\n2.0,b\n";
  return path.string();
}

} // namespace

TEST_CASE("estimate emits a JSON report with the contract fields") {
  const auto csv = write_toy_csv();
  const auto res =
      run_cli("estimate --input " + csv + " --label-col label --method ensemble");
  REQUIRE(res.exit_code == 0);
  const auto j = json::parse(res.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["estimate"].get<double>() >= 0.0);
  CHECK(j["estimate"].get<double>() <= 1.0);
  CHECK(j["method"] == "ensemble");
  CHECK(j["label_map"]["a"] == 1);
  CHECK(j["label_map"]["b"] == 2);
  CHECK(j.contains("config"));
  CHECK(j.contains("clamped_fraction"));
}

TEST_CASE("base method with an explicit epsilon reproduces the hand trace") {
  const auto csv = write_toy_csv();
  const auto res = run_cli("estimate --input " + csv +
                           " --label-col label --method base --epsilon 0.6"
                           " --clip-lo 0.01 --no-standardize");
  REQUIRE(res.exit_code == 0);
  const auto j = json::parse(res.out);
  CHECK(j["estimate"].get<double>() == doctest::Approx(0.2525).epsilon(1e-12));
}

TEST_CASE("a missing label column exits 2 and names the column") {
  const auto csv = write_toy_csv();
  const auto res = run_cli("estimate --input " + csv + " --label-col target");
  CHECK(res.exit_code == 2);
  CHECK(res.err.find("target") != std::string::npos);
}

TEST_CASE("a missing input file exits 1") {
  const auto res = run_cli("estimate --input /nonexistent/data.csv");
  CHECK(res.exit_code == 1);
}

TEST_CASE("weights subcommand emits the closed-form values") {
  const auto res = run_cli("weights --L 2 --d 1 --alpha 1 --scheme chebyshev");
  REQUIRE(res.exit_code == 0);
  const auto j = json::parse(res.out);
  CHECK(j["weights"][0].get<double>() == doctest::Approx(-0.207107).epsilon(1e-5));
  CHECK(j["weights"][1].get<double>() == doctest::Approx(1.207107).epsilon(1e-5));
  CHECK(j["norm"].get<double>() > 0.0);
}

TEST_CASE("uniform scheme gives 1/L weights and chebyshev residuals stay small") {
  {
    const auto res = run_cli("weights --L 4 --d 0 --scheme uniform");
    REQUIRE(res.exit_code == 0);
    const auto j = json::parse(res.out);
    for (const auto& w : j["weights"]) CHECK(w.get<double>() == doctest::Approx(0.25));
  }
  {
    const auto res = run_cli("weights --L 11 --d 10 --alpha 0.4 --scheme chebyshev");
    REQUIRE(res.exit_code == 0);
    const auto j = json::parse(res.out);
    for (const auto& r : j["constraint_residuals"])
      CHECK(r.get<double>() <= 1e-6);
  }
}

TEST_CASE("weights rejects L <= d with exit 2") {
  const auto res = run_cli("weights --L 3 --d 3");
  CHECK(res.exit_code == 2);
}

TEST_CASE("befs rejects r = 0 with exit 2") {
  const auto csv = write_toy_csv();
  const auto res = run_cli("befs --input " + csv + " --r 0");
  CHECK(res.exit_code == 2);
}

TEST_CASE("befs finds the informative column of a simulated dataset") {
  const auto csv = fs::temp_directory_path() / "bb_befs_sim.csv";
  REQUIRE(run_cli("simulate --family gaussian-shift --d 3 --delta 3 --n 200"
                  " --seed 11 --output " +
                  csv.string())
              .exit_code == 0);
  // the class shift lives on the first feature
  const auto res = run_cli("befs --input " + csv.string() + " --r 2 --threads 2");
  REQUIRE(res.exit_code == 0);
  const auto j = json::parse(res.out);
  CHECK(j["selected"][0] == 0);
  CHECK(j["ber_curve"].size() == 2);
  fs::remove(csv);
}

TEST_CASE("simulate is deterministic given a seed") {
  const auto out1 = fs::temp_directory_path() / "bb_sim1.csv";
  const auto out2 = fs::temp_directory_path() / "bb_sim2.csv";
  const std::string args = "simulate --family gaussian-shift --d 3 --delta 5"
                           " --n 50 --seed 7 --output ";
  REQUIRE(run_cli(args + out1.string()).exit_code == 0);
  REQUIRE(run_cli(args + out2.string()).exit_code == 0);
  std::ifstream a(out1), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("f1,f2,f3,label\n", 0) == 0);
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("sweep writes the fixed CSV header") {
  const auto res = run_cli(
      "sweep --family gaussian-shift --d 1 --delta 2 --sizes 40 --trials 2"
      " --oracle-mc 1000 --seed 3");
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.rfind("scheme,alpha,N,trial,estimate,oracle\n", 0) == 0);
}

TEST_CASE("clt emits the KS statistic and a pass flag") {
  const auto res = run_cli(
      "clt --family gaussian-shift --d 1 --delta 2 --n 60 --trials 100 --seed 5"
      " --threads 2");
  REQUIRE(res.exit_code == 0);
  const auto j = json::parse(res.out);
  CHECK(j.contains("ks_statistic"));
  CHECK(j.contains("p_value"));
  CHECK(j.contains("pass"));
}

TEST_CASE("failed runs do not leave partial output files") {
  const auto out = fs::temp_directory_path() / "bb_should_not_exist.json";
  fs::remove(out);
  const auto res = run_cli("estimate --input /nonexistent/x.csv --output " +
                           out.string());
  CHECK(res.exit_code == 1);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("BAYES_BENCH_THREADS caps workers when --threads is absent") {
  const auto csv = write_toy_csv();
  const auto res = run_cli("estimate --input " + csv + " --label-col label",
                           "BAYES_BENCH_THREADS=1 ");
  REQUIRE(res.exit_code == 0);
  CHECK(json::parse(res.out)["estimate"].get<double>() >= 0.0);
}

TEST_CASE("config file supplies defaults that flags override") {
  const auto cfg_path = fs::temp_directory_path() / "bb_cfg.json";
  {
    std::ofstream out(cfg_path);
    out << R"({"clip_lo": 0.01, "method": "base", "epsilon": 0.6,)"
        << R"( "standardize": false})";
  }
  const auto csv = write_toy_csv();
  // config alone reproduces the hand trace
  auto res = run_cli("estimate --config " + cfg_path.string() + " --input " + csv);
  REQUIRE(res.exit_code == 0);
  CHECK(json::parse(res.out)["estimate"].get<double>() ==
        doctest::Approx(0.2525).epsilon(1e-12));
  // an explicit flag overrides the config value
  res = run_cli("estimate --config " + cfg_path.string() + " --input " + csv +
                " --method symmetrized");
  REQUIRE(res.exit_code == 0);
  CHECK(json::parse(res.out)["method"] == "symmetrized");
  fs::remove(cfg_path);
}
