#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "mfchaos/csv.hpp"
#include "mfchaos/dynamics.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/experiment.hpp"
#include "mfchaos/rate_fit.hpp"
#include "mfchaos/store.hpp"

using namespace mfchaos;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mfchaos_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kBase = R"({
    "domain": {"type": "torus", "dim": 2},
    "n_particles": 16,
    "time": {"dt": 0.01, "horizon": 0.25},
    "noise": {"type": "brownian", "scale": 1.0},
    "interaction": {"name": "smooth_divfree", "params": {"m": 1}},
    "initial": {"type": "uniform"},
    "seed": 4242,
    "replicas": 1000,
    "mean_field": {"samples": 2000, "iterations": 2}
  })";

std::string plan_text(const std::string& sweep) {
  return std::string(R"({"base": )") + kBase + R"(, "sweep": )" + sweep + R"(, "tv_bins": 8})";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MFCHAOS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("rate fit recovers an exact power law") {
    std::vector<std::pair<double, double>> pts;
    for (double n : {8.0, 16.0, 32.0, 64.0}) pts.emplace_back(n, 3.0 / n);
    pts.emplace_back(128.0, 0.0);
    const RateFit fit = fit_rate(pts);
    CHECK(fit.slope == doctest::Approx(-1.0));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
    CHECK(fit.r2 == doctest::Approx(1.0));
    CHECK(fit.used == 4);
    CHECK(fit.excluded == 1);
    CHECK_FALSE(fit.flagged);
    for (double r : fit.residuals) CHECK(std::abs(r) < 1e-12);
    std::vector<std::pair<double, double>> sq, lin;
    for (double n : {16.0, 32.0, 64.0, 128.0}) sq.emplace_back(n, 3.0 / (n * n));
    CHECK(std::abs(fit_rate(sq).slope + 2.0) < 1e-9);
    CHECK(fit_rate(sq).r2 == doctest::Approx(1.0));
    for (double k : {1.0, 2.0, 4.0, 8.0}) lin.emplace_back(k, k / 50.0);
    CHECK(fit_rate(lin, RateAxis::k_at_fixed_n).slope == doctest::Approx(1.0));
    const std::vector<std::pair<double, double>> flat{{1, 2}, {2, 2}, {4, 2}};
    const RateFit f = fit_rate(flat, RateAxis::k_at_fixed_n);
    CHECK(f.flagged);
    CHECK(f.slope == 0.0);
    CHECK(to_string(f.axis) == "log_k");
    const std::vector<std::pair<double, double>> few{{1, 2}, {2, 1}, {4, -1}};
    CHECK_THROWS_AS(fit_rate(few), EstimatorError);
  }

  TEST_CASE("csv writer and reader round trip") {
    std::ostringstream out;
    CsvWriter w(out, {"name", "value", "count", "flag"});
    auto row = w.row();
    row << "a,\"b\"" << 0.1 << std::size_t{7} << true;
    row.end();
    auto row2 = w.row();
    row2 << "plain" << std::nan("") << -3 << false;
    row2.end();
    auto bad = w.row();
    bad << 1.0;
    CHECK_THROWS_AS(bad.end(), std::logic_error);
    std::istringstream in(out.str());
    const CsvTable t = read_csv(in);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][t.column("name")] == "a,\"b\"");
    CHECK(t.rows[0][t.column("value")] == "0.1");
    CHECK(t.rows[0][t.column("flag")] == "true");
    CHECK(t.rows[1][1] == "nan");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK_THROWS_AS(t.column("missing"), std::out_of_range);
  }

  TEST_CASE("ensemble store round trip") {
    const fs::path dir = scratch("store");
    SimConfig c = parse_config(kBase);
    c.replicas = 3;
    c.n_particles = 4;
    SimulationOptions o;
    o.record_steps = {0, 12, 25};
    const auto ens = simulate_particle_system(c, o);
    save_ensemble(ens, c, "interacting", dir / "traj.csv");
    CHECK(fs::exists(dir / "traj.json"));
    const StoredEnsemble back = load_ensemble(dir / "traj.csv");
    CHECK(back.kind == "interacting");
    CHECK(back.ensemble.recorded_steps == ens.recorded_steps);
    REQUIRE(back.ensemble.states.size() == ens.states.size());
    for (std::size_t q = 0; q < ens.states.size(); ++q) REQUIRE(back.ensemble.states[q] == ens.states[q]);
    CHECK(back.config.seed == c.seed);
    CHECK(library_versions().count("fftw") == 1);
    fs::remove(dir / "traj.json");
    CHECK_THROWS_AS(load_ensemble(dir / "traj.csv"), ConfigError);
  }

  TEST_CASE("plan parsing and validation") {
    const ExperimentPlan plan = parse_plan(plan_text(R"({"n": [8, 16], "k": [1, 2], "t": [0.1, 0.25]})"));
    CHECK(plan.n_values == std::vector<std::size_t>{8, 16});
    CHECK(plan.tv_bins == 8);
    CHECK(plan.uses(EstimatorKind::knn));
    CHECK_THROWS_AS(parse_plan(plan_text(R"({"n": [8], "k": [9], "t": [0.1]})")), ConfigError);
    CHECK_THROWS_AS(parse_plan(plan_text(R"({"n": [8], "k": [1], "t": [0.105]})")), ConfigError);
    CHECK_THROWS_AS(parse_plan(plan_text(R"({"n": [1], "k": [1], "t": [0.1]})")), ConfigError);
    CHECK_THROWS_AS(parse_plan(plan_text(R"({"n": [8], "k": [1], "t": [0.1], "x": 1})")), ConfigError);
  }

  TEST_CASE("an empty sweep writes only the manifest") {
    const fs::path dir = scratch("empty");
    const ExperimentPlan plan = parse_plan(plan_text(R"({"n": [], "k": [1], "t": [0.1]})"));
    CHECK(plan.empty());
    const ExperimentReport report = run_experiment(plan, 1);
    CHECK(report.entropy.empty());
    CHECK(report.exit_code == 0);
    write_report(plan, report, dir);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "entropy.csv"));
  }

  TEST_CASE("a single sweep point yields one row per estimator and checks") {
    const fs::path dir = scratch("single");
    const ExperimentPlan plan = parse_plan(plan_text(R"({"n": [16], "k": [1], "t": [0.25]})"));
    const ExperimentReport report = run_experiment(plan, 2);
    CHECK(report.failures.empty());
    std::map<std::string, int> kinds;
    for (const auto& row : report.entropy) {
      ++kinds[to_string(row.report.kind)];
      CHECK(row.report.n == 16);
      CHECK(row.report.t == doctest::Approx(0.25));
      CHECK(row.seed == 4242);
    }
    CHECK(kinds["girsanov_full"] == 1);
    CHECK(kinds["girsanov_subadditive"] == 1);
    CHECK(kinds["knn"] == 1);
    CHECK(kinds["histogram_tv"] == 1);
    std::map<std::string, int> checks;
    for (const auto& row : report.checks) ++checks[row.check];
    CHECK(checks["martingale"] == 1);
    CHECK(checks["pinsker"] == 1);
    CHECK(checks["subadditivity"] == 1);
    REQUIRE(report.bounds.size() == 1);
    CHECK(report.bounds[0].closed_form >= report.bounds[0].cascade);
    write_report(plan, report, dir);
    for (const char* f : {"entropy.csv", "bounds.csv", "checks.csv", "rate_fit.csv", "manifest.json"}) {
      CHECK(fs::exists(dir / f));
    }
    const CsvTable t = read_csv(dir / "entropy.csv");
    CHECK(t.header == std::vector<std::string>{"t", "n", "k", "estimator", "value", "stderr", "ess", "eps", "dt", "seed"});
    CHECK(t.rows.size() == report.entropy.size());
    std::ifstream mf(dir / "manifest.json");
    const auto manifest = nlohmann::json::parse(mf);
    CHECK(manifest.at("seed").get<std::uint64_t>() == 4242);
    CHECK(manifest.contains("versions"));
  }

  TEST_CASE("a Girsanov-only plan skips the sampled estimators") {
    ExperimentPlan plan = parse_plan(plan_text(R"({"n": [8], "k": [1, 2], "t": [0.25]})"));
    plan.estimators = {EstimatorKind::girsanov_full};
    const ExperimentReport report = run_experiment(plan, 1);
    CHECK(report.failures.empty());
    REQUIRE(report.entropy.size() == 3);
    CHECK(report.entropy[0].report.kind == EstimatorKind::girsanov_full);
    CHECK(report.entropy[1].report.kind == EstimatorKind::girsanov_subadditive);
    CHECK(report.entropy[2].report.k == 2);
  }

  TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("no-such-command") == 2);
    {
      std::ofstream bad(dir / "bad.json");
      bad << R"({"domain": {"type": "torus", "dim": 2}, "n_particles": 1, "time": {"dt": 0.1, "steps": 2}})";
    }
    CHECK(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " + dir.string()) == 2);
    {
      std::ofstream good(dir / "good.json");
      good << R"({"domain": {"type": "torus", "dim": 2}, "n_particles": 3, "time": {"dt": 0.1, "steps": 2},
                  "replicas": 2, "mean_field": {"samples": 20, "iterations": 1}})";
    }
    CHECK(run_cli("simulate --reference --config " + (dir / "good.json").string() + " --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "reference.json"));
    CHECK(run_cli("bounds --n 20 --t 0.5 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "bounds.csv"));
    CHECK(run_cli("noise-check --hurst 0.3 --points 3 --paths 2000 --out " + dir.string()) == 0);
    CHECK(run_cli("kernel-probe --cells 4 --out " + dir.string()) == 0);
    CHECK(run_cli("rate-fit --input " + (dir / "missing.csv").string()) != 0);
  }
}
