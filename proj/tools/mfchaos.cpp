// mfchaos command line driver.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mfchaos/bounds.hpp"
#include "mfchaos/config.hpp"
#include "mfchaos/csv.hpp"
#include "mfchaos/dynamics.hpp"
#include "mfchaos/entropy.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/experiment.hpp"
#include "mfchaos/girsanov.hpp"
#include "mfchaos/kernels.hpp"
#include "mfchaos/mean_field.hpp"
#include "mfchaos/noise.hpp"
#include "mfchaos/rate_fit.hpp"
#include "mfchaos/store.hpp"

namespace fs = std::filesystem;
using namespace mfchaos;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::size_t threads = 0;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "JSON config or experiment plan");
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "override the root seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads", c.threads, "worker threads (default: MFCHAOS_THREADS or all cores)");
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  return out;
}

SimConfig config_with_seed(const Common& c) {
  SimConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

std::vector<std::size_t> record_steps_for(const TimeGrid& grid, std::size_t every) {
  return strided_steps(grid, every == 0 ? std::max<std::size_t>(1, grid.steps() / 10) : every);
}

int cmd_simulate(const Common& c, std::size_t every, bool reference) {
  const SimConfig cfg = config_with_seed(c);
  SimulationOptions so;
  so.threads = c.threads;
  so.record_steps = record_steps_for(cfg.grid, every);
  const auto ens = simulate_particle_system(cfg, so);
  fs::create_directories(c.out);
  save_ensemble(ens, cfg, "interacting", fs::path(c.out) / "trajectory.csv");
  if (reference) {
    PicardOptions po;
    po.threads = c.threads;
    const auto law = solve_mckean_vlasov_picard(cfg, po);
    ReferenceOptions ro;
    ro.threads = c.threads;
    ro.record_steps = so.record_steps;
    save_ensemble(sample_reference_copies(cfg, law, ro), cfg, "reference", fs::path(c.out) / "reference.csv");
  }
  return 0;
}

int cmd_entropy(const Common& c, const std::string& trajectory, const std::string& reference,
                std::vector<std::size_t> ks, std::vector<double> ts, bool girsanov, std::size_t neighbors,
                std::size_t bins) {
  const StoredEnsemble p = load_ensemble(trajectory);
  const StoredEnsemble q = load_ensemble(reference);
  if (p.ensemble.dim != q.ensemble.dim || !(p.ensemble.grid == q.ensemble.grid)) {
    throw ConfigError("entropy: trajectory and reference stores disagree on grid or dimension");
  }
  const SimConfig& cfg = p.config;
  if (ts.empty()) ts.push_back(cfg.grid.time(p.ensemble.recorded_steps.back()));
  const Metric metric = cfg.on_torus() ? Metric::torus : Metric::euclidean;
  std::optional<GirsanovWeight> weights;
  if (girsanov) {
    SimConfig gcfg = cfg;
    if (!c.config.empty()) gcfg = config_with_seed(c);
    PicardOptions po;
    po.threads = c.threads;
    const auto law = solve_mckean_vlasov_picard(gcfg, po);
    GirsanovOptions go;
    go.threads = c.threads;
    go.record_steps = p.ensemble.recorded_steps;
    weights = girsanov_weight(gcfg, law, go);
  }
  auto out = open_out(c.out, "entropy.csv");
  CsvWriter csv(out, {"t", "n", "k", "estimator", "value", "stderr", "ess", "eps", "dt", "seed"});
  int code = 0;
  auto emit = [&](const EntropyReport& r) {
    auto row = csv.row();
    row << r.t << r.n << r.k << to_string(r.kind) << r.value << r.std_error << r.ess << p.ensemble.eps
        << cfg.grid.dt() << cfg.seed;
    row.end();
    if (!r.reliable) code = 4;
  };
  const std::size_t n = p.ensemble.n;
  for (double t : ts) {
    if (weights) {
      for (const auto& r : entropy_girsanov(*weights, std::min(ks.front(), n), t)) emit(r);
    }
    for (std::size_t k : ks) {
      const Marginal mp = extract_marginal(p.ensemble, k, t);
      const Marginal mq = extract_marginal(q.ensemble, k, t);
      EntropyReport knn = entropy_knn(mp.samples, mq.samples, neighbors, metric);
      knn.k = k;
      knn.n = n;
      knn.t = mp.time;
      emit(knn);
      if (k * p.ensemble.dim <= 4) {
        EntropyReport tv = tv_histogram(mp.samples, mq.samples, capped_tv_bins(bins, mp.samples.rows, mp.samples.cols),
                                        std::nullopt, cfg.on_torus());
        tv.k = k;
        tv.n = n;
        tv.t = mp.time;
        emit(tv);
      }
    }
  }
  return code;
}

int cmd_bounds(const Common& c, std::vector<std::size_t> ns, std::vector<std::size_t> ks, std::vector<double> ts,
               double c0, double gamma, double m, std::vector<double> kappas, std::vector<double> betas,
               double hurst, double frac_c) {
  if (!c.config.empty()) {
    const ExperimentPlan plan = load_plan(c.config);
    ns = plan.n_values;
    ks = plan.k_values;
    ts = plan.t_values;
    c0 = plan.bound_c0;
    gamma = plan.bound_gamma;
    m = plan.bound_m;
  }
  if (ns.empty() || ts.empty()) throw ConfigError("bounds: need --n and --t (or a plan via --config)");
  auto out = open_out(c.out, "bounds.csv");
  CsvWriter csv(out, {"n", "k", "t", "closed_form", "cascade", "C", "gamma", "M"});
  for (std::size_t n : ns) {
    std::vector<std::size_t> kk = ks;
    if (kk.empty()) {
      kk.resize(n);
      std::iota(kk.begin(), kk.end(), std::size_t{1});
    }
    for (double t : ts) {
      double dt = gamma > 0.0 ? 1.0 / (2.0 * gamma * static_cast<double>(n)) : 1.0;
      if (t > 0.0) dt = std::min(dt, t / 100.0);
      const auto env = hierarchy_ode_solve(n, m, gamma, chaotic_initial_entropy(c0, n), t, dt, 1u << 30);
      const double cc = constant_C(c0, gamma, m, t);
      for (std::size_t k : kk) {
        if (k < 1 || k > n) throw ConfigError("bounds: k must lie in [1, n]");
        auto row = csv.row();
        row << n << k << t << theorem_bound(cc, gamma, t, n, k) << env.at(env.times.size() - 1, k) << cc << gamma
            << m;
        row.end();
      }
      if (!theorem_bound_applies(gamma, t, n)) {
        std::cerr << "warning: n = " << n << " < 6 exp(gamma t) at t = " << t << "\n";
      }
    }
  }
  if (!kappas.empty() && !betas.empty()) {
    auto hout = open_out(c.out, "horizon.csv");
    CsvWriter h(hout, {"kappa", "beta", "H", "delta_star"});
    for (double kappa : kappas) {
      for (double beta : betas) {
        const auto est = hurst == 0.5 ? short_time_horizon_brownian(kappa, beta)
                                      : short_time_horizon_fractional(kappa, beta, hurst, frac_c);
        auto row = h.row();
        row << kappa << beta << hurst << est.delta_star;
        row.end();
      }
    }
  }
  return 0;
}

int cmd_noise_check(const Common& c, std::vector<double> hursts, std::size_t points, std::size_t paths,
                    double horizon) {
  const std::uint64_t seed = c.seed.value_or(0);
  auto out = open_out(c.out, "noise_check.csv");
  CsvWriter csv(out, {"t", "s", "H", "emp", "exact", "stderr"});
  bool pass = true;
  for (double h : hursts) {
    const auto check = fbm_covariance_check(points, horizon, h, paths, seed, 4.0, c.threads);
    for (const auto& cell : check.cells) {
      auto row = csv.row();
      row << cell.t << cell.s << h << cell.empirical << cell.exact << cell.std_error;
      row.end();
    }
    std::cerr << "H = " << h << ": max |z| = " << check.max_abs_z << (check.pass ? "" : " (FAIL)") << "\n";
    pass = pass && check.pass;
  }
  return pass ? 0 : 5;
}

int cmd_kernel_probe(const Common& c, const std::string& kind, std::size_t cells, int radius, double eps, int m) {
  auto out = open_out(c.out, "kernel_probe.csv");
  CsvWriter csv(out, {"x1", "x2", "K1", "K2", "div_estimate"});
  std::function<Vec2(Vec2)> kernel;
  if (kind == "biot_savart_periodic") {
    kernel = [&](Vec2 x) { return biot_savart_periodic_regularized(x, radius, eps); };
  } else if (kind == "biot_savart_free") {
    kernel = [&](Vec2 x) { return biot_savart_free_regularized(x, eps); };
  } else if (kind == "smooth_divfree") {
    kernel = [&](Vec2 x) { return smooth_divfree_kernel(wrap_torus(std::span<const double>(x.data(), 2)), m); };
  } else {
    throw ConfigError("kernel-probe: unknown kernel '" + kind + "'");
  }
  const double h = 1e-5;
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = 0; j < cells; ++j) {
      const Vec2 x{-0.5 + (static_cast<double>(i) + 0.5) / static_cast<double>(cells),
                   -0.5 + (static_cast<double>(j) + 0.5) / static_cast<double>(cells)};
      const Vec2 k = kernel(x);
      auto row = csv.row();
      row << x[0] << x[1] << k[0] << k[1] << numeric_divergence(kernel, x, h);
      row.end();
    }
  }
  return 0;
}

int cmd_rate_fit(const Common& c, const std::string& input, const std::string& estimator, const std::string& axis,
                 std::size_t fixed, std::optional<double> t) {
  const CsvTable table = read_csv(input);
  const RateAxis ax = axis == "k" ? RateAxis::k_at_fixed_n : RateAxis::n_at_fixed_k;
  std::vector<std::pair<double, double>> points;
  const bool entropy_layout = std::find(table.header.begin(), table.header.end(), "estimator") != table.header.end();
  if (entropy_layout) {
    const std::size_t ce = table.column("estimator"), cn = table.column("n"), ck = table.column("k"),
                      ct = table.column("t"), cv = table.column("value");
    for (const auto& row : table.rows) {
      if (row[ce] != estimator) continue;
      const double rn = std::stod(row[cn]), rk = std::stod(row[ck]), rt = std::stod(row[ct]);
      if (t && std::abs(rt - *t) > 1e-9) continue;
      if (ax == RateAxis::n_at_fixed_k) {
        if (fixed != 0 && rk != static_cast<double>(fixed)) continue;
        points.emplace_back(rn, std::stod(row[cv]));
      } else {
        if (fixed != 0 && rn != static_cast<double>(fixed)) continue;
        points.emplace_back(rk, std::stod(row[cv]));
      }
    }
  } else {
    const std::size_t cx = table.column("x"), ch = table.column("H");
    for (const auto& row : table.rows) points.emplace_back(std::stod(row[cx]), std::stod(row[ch]));
  }
  const RateFit fit = fit_rate(points, ax);
  auto out = open_out(c.out, "rate_fit.csv");
  CsvWriter csv(out, {"estimator", "axis", "fixed", "slope", "intercept", "r2", "used", "excluded", "flagged"});
  auto row = csv.row();
  row << (entropy_layout ? estimator : std::string("input")) << to_string(ax) << fixed << fit.slope << fit.intercept
      << fit.r2 << fit.used << fit.excluded << fit.flagged;
  row.end();
  std::cout << "slope " << format_double(fit.slope) << "  R^2 " << format_double(fit.r2)
            << (fit.flagged ? "  (flat input)" : "") << "\n";
  return 0;
}

int cmd_run(const Common& c) {
  ExperimentPlan plan = load_plan(c.config);
  if (c.seed) plan.base.seed = *c.seed;
  const fs::path dir = c.out != "." || plan.output_dir.empty() ? fs::path(c.out) : plan.output_dir;
  const ExperimentReport report = run_experiment(plan, c.threads);
  write_report(plan, report, dir);
  for (const auto& f : report.failures) std::cerr << "n = " << f.n << " failed: " << f.message << "\n";
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field particle systems: simulation, entropy estimation and chaos bounds"};
  app.require_subcommand(1);

  Common common;
  std::size_t every = 0;
  bool reference = false;
  auto* sim = app.add_subcommand("simulate", "simulate the particle system and write a trajectory store");
  add_common(sim, common, true);
  sim->add_option("--record-every", every, "record every k-th step (default: 10 records)");
  sim->add_flag("--reference", reference, "also write reference copies of the limit law");

  std::string trajectory, reference_path;
  std::vector<std::size_t> ks{1};
  std::vector<double> ts;
  bool girsanov = false;
  std::size_t neighbors = 4, bins = 20;
  auto* ent = app.add_subcommand("entropy", "estimate marginal entropies from stores");
  add_common(ent, common, false);
  ent->add_option("--trajectory", trajectory, "interacting trajectory store (csv)")->required();
  ent->add_option("--reference", reference_path, "reference store (csv)")->required();
  ent->add_option("--k", ks, "marginal sizes");
  ent->add_option("--t", ts, "times (default: last recorded)");
  ent->add_flag("--girsanov", girsanov, "also compute the Girsanov full-system entropy");
  ent->add_option("--neighbors", neighbors, "kNN neighbour count");
  ent->add_option("--bins", bins, "TV histogram bins per axis (capped at ~20 samples per cell)");

  std::vector<std::size_t> bn, bk;
  std::vector<double> bt, kappas, betas;
  double c0 = 1.0, gamma = 1.0, m = 1.0, hurst = 0.5, frac_c = 16.0;
  auto* bnd = app.add_subcommand("bounds", "closed-form and cascade entropy bounds");
  add_common(bnd, common, false);
  bnd->add_option("--n", bn, "particle counts");
  bnd->add_option("--k", bk, "marginal sizes (default: 1..n)");
  bnd->add_option("--t", bt, "times");
  bnd->add_option("--C0", c0, "initial chaos constant");
  bnd->add_option("--gamma", gamma, "hierarchy coupling");
  bnd->add_option("--M", m, "source constant");
  bnd->add_option("--kappa", kappas, "drift constants for the horizon table");
  bnd->add_option("--beta", betas, "moment constants for the horizon table");
  bnd->add_option("--hurst", hurst, "Hurst index for the horizon table");
  bnd->add_option("--frac-C", frac_c, "fractional horizon constant");

  std::vector<double> hursts{0.2, 0.5, 0.8};
  std::size_t points = 8, paths = 100000;
  double horizon = 1.0;
  auto* noise = app.add_subcommand("noise-check", "empirical vs exact fBm covariance");
  add_common(noise, common, false);
  noise->add_option("--hurst", hursts, "Hurst indices");
  noise->add_option("--points", points, "grid points");
  noise->add_option("--paths", paths, "sample paths");
  noise->add_option("--horizon", horizon, "final time");

  std::string kind = "biot_savart_periodic";
  std::size_t cells = 32;
  int radius = 8, freq = 1;
  double eps = 1e-2;
  auto* kp = app.add_subcommand("kernel-probe", "kernel values and divergence on a grid");
  add_common(kp, common, false);
  kp->add_option("--kernel", kind, "biot_savart_periodic, biot_savart_free or smooth_divfree");
  kp->add_option("--cells", cells, "grid cells per axis");
  kp->add_option("--radius", radius, "lattice truncation radius");
  kp->add_option("--eps", eps, "regularization radius");
  kp->add_option("--frequency", freq, "smooth kernel frequency");

  std::string input, estimator = "knn", axis = "n";
  std::size_t fixed = 0;
  std::optional<double> fit_t;
  auto* rf = app.add_subcommand("rate-fit", "log-log rate fit of entropy values");
  add_common(rf, common, false);
  rf->add_option("--input", input, "entropy.csv or a csv with columns x,H")->required();
  rf->add_option("--estimator", estimator, "estimator name to select");
  rf->add_option("--axis", axis, "n or k")->check(CLI::IsMember({"n", "k"}));
  rf->add_option("--fixed", fixed, "fixed k (axis n) or n (axis k); 0 keeps all");
  rf->add_option("--t", fit_t, "time to select");

  auto* run = app.add_subcommand("run", "run an experiment plan end to end");
  add_common(run, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return cmd_simulate(common, every, reference);
    if (*ent) return cmd_entropy(common, trajectory, reference_path, ks, ts, girsanov, neighbors, bins);
    if (*bnd) return cmd_bounds(common, bn, bk, bt, c0, gamma, m, kappas, betas, hurst, frac_c);
    if (*noise) return cmd_noise_check(common, hursts, points, paths, horizon);
    if (*kp) return cmd_kernel_probe(common, kind, cells, radius, eps, freq);
    if (*rf) return cmd_rate_fit(common, input, estimator, axis, fixed, fit_t);
    if (*run) return cmd_run(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(std::current_exception());
  }
  return 0;
}
