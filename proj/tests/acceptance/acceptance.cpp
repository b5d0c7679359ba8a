// Acceptance gate: one pass/fail line per criterion.
//
//   acceptance            run all criteria
//   acceptance --only N   run criterion N (1..9)
//
// Exit status is 0 when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "mfchaos/bounds.hpp"
#include "mfchaos/checks.hpp"
#include "mfchaos/concentration.hpp"
#include "mfchaos/config.hpp"
#include "mfchaos/drift.hpp"
#include "mfchaos/entropy.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/experiment.hpp"
#include "mfchaos/girsanov.hpp"
#include "mfchaos/kernels.hpp"
#include "mfchaos/mean_field.hpp"
#include "mfchaos/noise.hpp"
#include "mfchaos/rate_fit.hpp"
#include "mfchaos/rng.hpp"
#include "mfchaos/torus.hpp"
#include "stats.hpp"

using namespace mfchaos;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

// Collects informational lines and sub-check results for one criterion.
class Log {
 public:
  explicit Log(int id) : id_(id) {}
  void info(const std::string& line) { std::cout << "    criterion " << id_ << ": " << line << "\n"; }
  bool expect(bool ok, const std::string& what) {
    std::cout << "    criterion " << id_ << ": " << (ok ? "ok   " : "FAIL ") << what << "\n";
    all_ &= ok;
    return ok;
  }
  bool all() const { return all_; }

 private:
  int id_;
  bool all_ = true;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

// 1. Empirical fBm covariance on an 8-point grid against R_H.
Outcome noise_exactness() {
  Log log(1);
  for (double h : {0.2, 0.5, 0.8}) {
    const auto check = fbm_covariance_check(8, 1.0, h, 100000, 20240601, 4.0);
    log.expect(check.pass, "H=" + fmt(h) + ": max |z| = " + fmt(check.max_abs_z, 4) + " over " +
                               std::to_string(check.cells.size()) + " cells" +
                               (check.used_fallback ? " (Cholesky fallback)" : ""));
  }
  return {log.all(), "fBm covariance within 4 standard errors for H in {0.2, 0.5, 0.8}"};
}

// 2. Periodic Biot-Savart: exact antisymmetry, divergence, L^p behaviour.
Outcome kernel_correctness() {
  Log log(2);
  RngStream rng(20240602, 0, 0, kStreamMisc);
  std::size_t asym_bad = 0;
  double div_max = 0.0;
  std::size_t probes = 0;
  auto kernel = [](Vec2 x) { return biot_savart_periodic(wrap_torus(std::vector<double>{x[0], x[1]}), 8, 0.0); };
  while (probes < 100) {
    const double a = rng.uniform() - 0.5, b = rng.uniform() - 0.5;
    if (std::hypot(a, b) < 0.1 || a == -0.5 || b == -0.5) continue;
    const Vec2 p = biot_savart_periodic(TorusPoint(std::vector<double>{a, b}), 8, 0.0);
    const Vec2 m = biot_savart_periodic(TorusPoint(std::vector<double>{-a, -b}), 8, 0.0);
    if (p[0] != -m[0] || p[1] != -m[1]) ++asym_bad;
    div_max = std::max(div_max, std::abs(numeric_divergence(kernel, {a, b}, 1e-4)));
    ++probes;
  }
  log.expect(asym_bad == 0, "K(-x) = -K(x) bit for bit at 100 points (" + std::to_string(asym_bad) + " mismatches)");
  log.expect(div_max < 1e-3, "max |div K| over 100 probes with |x| >= 0.1: " + fmt(div_max, 3));

  auto reg = [](Vec2 x) { return biot_savart_periodic_regularized(x, 8, 0.0); };
  std::vector<double> lp15, lp2;
  for (std::size_t cells : {32u, 64u, 128u, 256u}) {
    lp15.push_back(grid_lp_integral(reg, cells, 1.5));
    lp2.push_back(grid_lp_integral(reg, cells, 2.0));
  }
  std::string s15, s2;
  for (std::size_t i = 0; i < 4; ++i) {
    s15 += fmt(lp15[i], 5) + " ";
    s2 += fmt(lp2[i], 5) + " ";
  }
  log.info("grid L^1.5 at 32/64/128/256 cells: " + s15);
  log.info("grid L^2   at 32/64/128/256 cells: " + s2);
  // p < 2: increments shrink geometrically and the last one is below 2%.
  bool stabilizes = std::abs(lp15[3] - lp15[2]) < 0.02 * lp15[3];
  for (std::size_t i = 2; i < 4; ++i) {
    stabilizes &= std::abs(lp15[i] - lp15[i - 1]) < 0.8 * std::abs(lp15[i - 1] - lp15[i - 2]);
  }
  log.expect(stabilizes, "L^1.5 quadrature stabilizes under refinement");
  // p = 2: every doubling adds about log(2) / (2 pi); growth never settles.
  bool grows = true;
  const double step = std::log(2.0) / (2.0 * std::numbers::pi);
  for (std::size_t i = 1; i < 4; ++i) grows &= lp2[i] - lp2[i - 1] > 0.5 * step;
  log.expect(grows, "L^2 quadrature grows by at least log(2)/(4 pi) per doubling");
  return {log.all(), "periodic Biot-Savart antisymmetry, divergence and L^p behaviour"};
}

// 3. Gaussian shift: P = law of W + c t, Q = law of W, c = 1, T = 0.5.
Outcome oracle_equivalence() {
  Log log(3);
  const double c = 1.0, horizon = 0.5, dt = 1e-2;
  const std::size_t replicas = 10000;
  const TimeGrid grid = TimeGrid::from_horizon(0.0, horizon, dt);
  const std::size_t steps = grid.steps();
  const std::vector<double> u(steps, c);
  std::vector<double> log_z(replicas);
  SampleMatrix p_t(replicas, 1), q_t(replicas, 1);
  for (std::size_t r = 0; r < replicas; ++r) {
    RngStream rw(20240603, r, 0, kStreamGirsanovW);
    const NoisePath w = sample_brownian(grid, 1, rw);
    std::vector<double> dw(steps);
    for (std::size_t k = 0; k < steps; ++k) dw[k] = w.values[k + 1] - w.values[k];
    log_z[r] = accumulate_log_weight(u, dw, dt);
    p_t.data[r] = w.values[steps] + c * horizon;
    RngStream rq(20240603, r, 1, kStreamGirsanovW);
    q_t.data[r] = sample_brownian(grid, 1, rq).values[steps];
  }
  const double exact = 0.5 * c * c * horizon;
  const auto gir = girsanov_entropy_from_log_weights(log_z, 1, horizon);
  log.expect(std::abs(gir.value - exact) <= 3.0 * gir.std_error,
             "Girsanov entropy " + fmt(gir.value) + " +- " + fmt(gir.std_error, 3) + " vs 0.25 (3 stderr)");
  const auto mart = check_martingale(log_z);
  log.info("E[Z_T] = " + fmt(mart.mean) + " +- " + fmt(mart.std_error, 3));

  const auto knn = entropy_knn(p_t, q_t, 4);
  log.expect(std::abs(knn.value - exact) <= 0.1,
             "kNN entropy of the time-T marginal " + fmt(knn.value) + " vs 0.25 (+-0.1)");

  // The shift case has TV = 2 Phi(c sqrt(T) / 2) - 1; the unit-variance unit-shift
  // pair has TV = 2 Phi(1/2) - 1. Both are checked.
  const auto tv_shift = tv_histogram(p_t, q_t, 64, std::make_pair(-6.0, 7.0));
  const double tv_shift_exact = 2.0 * test::normal_cdf(c * std::sqrt(horizon) / 2.0) - 1.0;
  log.expect(std::abs(tv_shift.value - tv_shift_exact) <= 0.02,
             "TV of the shift case " + fmt(tv_shift.value) + " vs " + fmt(tv_shift_exact) + " (+-0.02)");
  SampleMatrix a(100000, 1), b(100000, 1);
  RngStream ra(20240603, 0, 0, kStreamMisc), rb(20240603, 1, 0, kStreamMisc);
  for (std::size_t r = 0; r < a.rows; ++r) {
    a.data[r] = ra.normal();
    b.data[r] = rb.normal() + 1.0;
  }
  const auto tv_unit = tv_histogram(a, b, 64, std::make_pair(-6.0, 7.0));
  log.expect(std::abs(tv_unit.value - 0.38292492254802621) <= 0.02,
             "TV of N(0,1) vs N(1,1), 64 bins on [-6,7]: " + fmt(tv_unit.value) + " vs 0.3829 (+-0.02)");

  // One coordinate: the marginal and the full system coincide, so the
  // subadditivity side compares the kNN and Girsanov routes directly.
  EntropyReport hk = knn, tv = tv_shift, full = gir;
  hk.k = tv.k = hk.n = tv.n = full.k = full.n = 1;
  hk.t = tv.t = full.t = horizon;
  const double tol = combined_tolerance(hk, tv, full);
  const auto pc = pinsker_and_subadditivity_check(hk, tv, full, tol);
  log.expect(pc.pinsker_pass, "Pinsker: TV " + fmt(tv.value) + " <= sqrt(2 H) " +
                                  fmt(std::sqrt(2.0 * std::max(0.0, hk.value))) + " + " + fmt(tol, 3));
  log.expect(pc.subadditivity_pass, "kNN entropy within tolerance of the Girsanov path entropy");
  return {log.all(), "Gaussian shift oracle: Girsanov, kNN, TV and Pinsker"};
}

// 4. E[Z_t] = 1 on every shipped experiment config.
Outcome martingale_normalization() {
  Log log(4);
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(MFCHAOS_CONFIG_DIR)) {
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) return {false, "no experiment configs found"};
  for (const fs::path& path : configs) {
    const ExperimentPlan plan = load_plan(path);
    const MeanFieldLaw law = solve_mckean_vlasov_picard(plan.base);
    GirsanovOptions go;
    for (double t : plan.t_values) go.record_steps.push_back(plan.base.grid.nearest(t).step);
    for (std::size_t n : plan.n_values) {
      go.n = n;
      const GirsanovWeight w = girsanov_weight(plan.base, law, go);
      for (double t : plan.t_values) {
        const auto m = check_martingale(w, t);
        log.expect(m.pass, path.filename().string() + " n=" + std::to_string(n) + " t=" + fmt(t) +
                               ": E[Z] = " + fmt(m.mean) + " +- " + fmt(m.std_error, 3));
      }
    }
  }
  return {log.all(), "E[Z_t] = 1 within 3 stderr on every shipped config"};
}

SimConfig smooth_torus_base(double horizon, std::size_t replicas) {
  SimConfig c;
  c.domain = DomainKind::torus;
  c.dim = 2;
  c.n_particles = 16;
  c.grid = TimeGrid::from_horizon(0.0, horizon, 1e-3);
  c.interaction.name = "smooth_divfree";
  c.interaction.params["m"] = {1};
  c.initial.kind = InitialLaw::Kind::uniform;
  c.seed = 20240605;
  c.replicas = replicas;
  c.mean_field.samples = 4000;
  c.mean_field.iterations = 2;
  return c;
}

// 5. kNN 1-marginal entropy decays along n on the smooth torus.
Outcome chaos_decay() {
  Log log(5);
  ExperimentPlan plan;
  plan.base = smooth_torus_base(0.25, 10000);
  plan.n_values = {16, 32, 64, 128};
  plan.k_values = {1};
  plan.t_values = {0.25};
  plan.estimators = {EstimatorKind::knn};
  const ExperimentReport report = run_experiment(plan);
  for (const auto& f : report.failures) log.info("n=" + std::to_string(f.n) + " failed: " + f.message);
  std::vector<std::pair<double, double>> points;
  for (const auto& row : report.entropy) {
    points.emplace_back(static_cast<double>(row.report.n), row.report.value);
    log.info("n=" + std::to_string(row.report.n) + "  H_1 (kNN) = " + fmt(row.report.value) + " +- " +
             fmt(row.report.std_error, 3));
  }
  if (points.size() != plan.n_values.size()) return {false, "missing sweep points"};

  bool decreasing = true;
  for (std::size_t i = 1; i < points.size(); ++i) decreasing &= points[i].second < points[i - 1].second;
  log.expect(decreasing, "H_1 strictly decreases along n = 16, 32, 64, 128");
  try {
    const RateFit fit = fit_rate(points);
    log.expect(fit.slope <= -0.8, "fit_rate slope " + fmt(fit.slope, 4) + " <= -0.8 (R^2 = " + fmt(fit.r2, 3) +
                                      ", used " + std::to_string(fit.used) + ", excluded " +
                                      std::to_string(fit.excluded) + ")");
  } catch (const EstimatorError& e) {
    log.expect(false, std::string("fit_rate refused: ") + e.what());
  }

  // Bound envelope with gamma = 1 and the smallest C covering every estimate.
  const double gamma = 1.0, t = 0.25;
  double c_fit = 0.0;
  for (const auto& [n, h] : points) {
    c_fit = std::max(c_fit, h / theorem_bound(1.0, gamma, t, static_cast<std::size_t>(n), 1));
  }
  log.info("fitted envelope constant C = " + fmt(c_fit) + " at gamma = 1 (C = 0 means every estimate <= 0)");
  for (const auto& [n, h] : points) {
    log.info("  n=" + fmt(n) + ": H_1 " + fmt(h) + " <= C-envelope " +
             fmt(theorem_bound(c_fit, gamma, t, static_cast<std::size_t>(n), 1)));
  }
  return {log.all(), "kNN 1-marginal entropy decays along n with slope <= -0.8"};
}

// 6. Short-time linear-growth regime: H_full / n roughly constant in n.
Outcome short_time_linear() {
  Log log(6);
  SimConfig base;
  base.domain = DomainKind::euclidean;
  base.dim = 1;
  base.n_particles = 32;
  base.grid = TimeGrid::from_horizon(0.0, 0.1, 1e-3);
  base.interaction.name = "linear_sum";
  base.initial.kind = InitialLaw::Kind::gaussian;
  base.initial.sigma = 1.0;
  base.seed = 20240606;
  base.replicas = 10000;
  base.mean_field.samples = 4000;
  base.mean_field.iterations = 3;

  // Pilot run: beta from the moments of int_0^delta |Delta b|^2 at n = 32.
  const double delta = 0.05;
  const MeanFieldLaw pilot_law = solve_mckean_vlasov_picard(base);
  GirsanovOptions po;
  po.replicas = 4000;
  po.record_steps = {base.grid.nearest(delta).step};
  const GirsanovWeight pilot = girsanov_weight(base, pilot_law, po);
  std::vector<double> energies(pilot.replicas);
  for (std::size_t r = 0; r < pilot.replicas; ++r) energies[r] = pilot.energy[r];
  const BetaFit beta = estimate_beta(energies, 32, delta);
  const double kappa = make_drift(base).growth_constant;
  const HorizonEstimate horizon = short_time_horizon_brownian(kappa, beta.beta);
  const double t = base.grid.time(base.grid.nearest(std::min(0.1, horizon.delta_star / 2.0)).step);
  log.info("beta = " + fmt(beta.beta) + " (fit residual " + fmt(beta.residual, 3) + "), kappa = " + fmt(kappa) +
           ", delta* = " + fmt(horizon.delta_star) + ", t = " + fmt(t));
  if (!(t > 0.0)) return {false, "short-time horizon below one grid step"};

  ExperimentPlan plan;
  plan.base = base;
  plan.base.grid = TimeGrid(0.0, 1e-3, base.grid.nearest(t).step);
  plan.n_values = {32, 64, 128, 256};
  plan.k_values = {1};
  plan.t_values = {t};
  plan.estimators = {EstimatorKind::girsanov_full};
  const ExperimentReport report = run_experiment(plan);
  for (const auto& f : report.failures) log.info("n=" + std::to_string(f.n) + " failed: " + f.message);
  std::vector<double> per_particle, full;
  for (const auto& row : report.entropy) {
    if (row.report.kind != EstimatorKind::girsanov_full) continue;
    const double n = static_cast<double>(row.report.n);
    full.push_back(row.report.value);
    per_particle.push_back(row.report.value / n);
    log.info("n=" + std::to_string(row.report.n) + "  H_full = " + fmt(row.report.value) + " +- " +
             fmt(row.report.std_error, 3) + "  H_full/n = " + fmt(row.report.value / n) + "  ESS = " +
             fmt(row.report.ess, 5));
  }
  for (const auto& c : report.checks) {
    if (c.check == "martingale") log.expect(c.pass, "martingale at n=" + std::to_string(c.n) + ": E[Z] = " + fmt(c.observed));
  }
  if (per_particle.size() != plan.n_values.size()) return {false, "missing sweep points"};
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    return (*hi - *lo) / std::abs(mean);
  };
  log.info("H_full itself varies by " + fmt(100.0 * spread(full), 3) + "% across n");
  const double var = spread(per_particle);
  log.expect(var < 0.25, "H_full/n varies by " + fmt(100.0 * var, 3) + "% across n = 32..256 (< 25%)");
  return {log.all(), "H_full/n varies by < 25% across n in the short-time regime"};
}

// 7. Hoeffding and moment-bound domination.
Outcome concentration_suite() {
  Log log(7);
  const int n = 100;
  const std::size_t trials = 100000;
  const std::vector<double> grid{0.05, 0.1, 0.15, 0.2, 0.25};
  std::vector<std::size_t> hits(grid.size(), 0);
  RngStream rng(20240607, 0, 0, kStreamMisc);
  for (std::size_t t = 0; t < trials; ++t) {
    int s = 0;
    for (int i = 0; i < n; ++i) s += (rng() >> 63) != 0u ? 1 : -1;
    const double m = std::abs(static_cast<double>(s) / n);
    for (std::size_t e = 0; e < grid.size(); ++e) hits[e] += m >= grid[e] - 1e-12 ? 1 : 0;
  }
  for (std::size_t e = 0; e < grid.size(); ++e) {
    const double freq = static_cast<double>(hits[e]) / trials;
    const double bound = hoeffding_bound(n, grid[e], 1.0).value;
    const double slack = 3.0 * std::sqrt(bound * (1.0 - bound) / trials);
    log.expect(freq <= bound + slack,
               "eps=" + fmt(grid[e]) + ": frequency " + fmt(freq, 4) + " <= bound " + fmt(bound, 4));
  }
  RngStream g(20240607, 1, 0, kStreamMisc);
  double m2 = 0.0, m4 = 0.0, m6 = 0.0;
  const std::size_t samples = 1000000;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = g.normal(), x2 = x * x;
    m2 += x2;
    m4 += x2 * x2;
    m6 += x2 * x2 * x2;
  }
  const std::vector<double> moments{m2 / samples, m4 / samples, m6 / samples};
  for (int q = 1; q <= 3; ++q) {
    const double bound = moment_bound(q, 1.0).value;
    log.expect(moments[q - 1] <= bound, "E[X^" + std::to_string(2 * q) + "] = " + fmt(moments[q - 1], 4) +
                                            " <= " + fmt(bound));
  }
  return {log.all(), "Hoeffding and moment bounds dominate their empirical counterparts"};
}

// 8. Closed form dominates the cascade; constant and horizon arithmetic.
Outcome bounds_suite() {
  Log log(8);
  const double c0 = 1.0;
  std::size_t violations = 0, compared = 0;
  for (double horizon : {0.5, 1.0}) {
    for (std::size_t n : {50u, 100u}) {
      for (double gamma : {0.5, 1.0}) {
        for (double m : {0.1, 1.0}) {
          const auto env = hierarchy_ode_solve(n, m, gamma, chaotic_initial_entropy(c0, n), horizon,
                                               1.0 / (2.0 * gamma * static_cast<double>(n)), 1000000);
          const double c = constant_C(c0, gamma, m, horizon);
          const std::size_t last = env.times.size() - 1;
          const auto kmax = static_cast<std::size_t>(static_cast<double>(n) * std::exp(-gamma * horizon));
          for (std::size_t k = 1; k <= kmax; ++k) {
            ++compared;
            if (env.at(last, k) > theorem_bound(c, gamma, horizon, n, k)) ++violations;
          }
        }
      }
    }
  }
  log.expect(violations == 0, "closed form >= cascade at " + std::to_string(compared) + " grid points (" +
                                  std::to_string(violations) + " violations)");
  log.expect(rel_close(constant_C(1.0, 1.0, 1.0, 1.0), 24.0 * std::exp(6.0), 1e-12),
             "constant_C(1, 1, 1, 1) = 24 e^6 = " + fmt(constant_C(1.0, 1.0, 1.0, 1.0), 16));
  log.expect(constant_C(1.0, 0.0, 0.0, 3.0) == 8.0 && constant_C(0.0, 2.0, 0.0, 1.0) == 0.0,
             "constant_C trivial cases");
  log.expect(rel_close(theorem_bound(1.0, -std::log(0.9), 1.0, 100, 1), 2e-4, 1e-12),
             "theorem_bound(k=1, n=100, e^{-gamma T}=0.9) = 2e-4");
  log.expect(rel_close(short_time_horizon_brownian(1.0, 2.0).delta_star, 0.03125, 1e-12),
             "Brownian horizon kappa=1, beta=2: 1/32");
  log.expect(rel_close(short_time_horizon_fractional(1.0, 2.0, 0.75, 16.0).delta_star, 0.0009765625, 1e-12),
             "fractional horizon H=0.75, C=16, kappa=1, beta=2: 32^-2");
  return {log.all(), "bound dominance, constant and horizon arithmetic"};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 9. The CLI pipeline is byte-identical across thread counts.
Outcome determinism() {
  Log log(9);
  const fs::path root = fs::temp_directory_path() / "mfchaos_acceptance_determinism";
  fs::remove_all(root);
  const fs::path config = fs::path(MFCHAOS_CONFIG_DIR) / "smooth_torus.json";
  std::vector<fs::path> dirs;
  for (int threads : {1, 3}) {
    const fs::path dir = root / ("threads" + std::to_string(threads));
    const std::string cmd = std::string(MFCHAOS_CLI_PATH) + " run --config " + config.string() + " --threads " +
                            std::to_string(threads) + " --out " + dir.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    log.expect(code == 0, "run with --threads " + std::to_string(threads) + " exited " + std::to_string(code));
    dirs.push_back(dir);
  }
  for (const char* name : {"entropy.csv", "bounds.csv", "checks.csv", "rate_fit.csv"}) {
    const std::string a = read_file(dirs[0] / name), b = read_file(dirs[1] / name);
    log.expect(!a.empty() && a == b, std::string(name) + " identical (" + std::to_string(a.size()) + " bytes)");
  }
  return {log.all(), "pipeline CSVs byte-identical across --threads"};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only N]\n";
      return 2;
    }
  }
  const std::vector<std::function<Outcome()>> criteria{
      noise_exactness,   kernel_correctness,  oracle_equivalence, martingale_normalization, chaos_decay,
      short_time_linear, concentration_suite, bounds_suite,       determinism};
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "criterion must lie in 1.." << criteria.size() << "\n";
    return 2;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << i + 1 << ": " << out.summary << " ("
              << fmt(secs, 3) << " s)" << std::endl;
    all &= out.pass;
  }
  return all ? 0 : 1;
}
