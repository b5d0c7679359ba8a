#include "mfchaos/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "config_json.hpp"
#include "mfchaos/bounds.hpp"
#include "mfchaos/checks.hpp"
#include "mfchaos/csv.hpp"
#include "mfchaos/dynamics.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/girsanov.hpp"
#include "mfchaos/mean_field.hpp"
#include "mfchaos/store.hpp"

namespace mfchaos {

namespace {

using detail::Json;

std::optional<EstimatorKind> estimator_from_string(const std::string& s) {
  for (auto k : {EstimatorKind::girsanov_full, EstimatorKind::knn, EstimatorKind::histogram_tv}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

template <class T>
std::vector<T> number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a list");
  std::vector<T> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(where + ": expected numbers");
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(where + ": expected non-negative integers");
      }
    }
    out.push_back(v.get<T>());
  }
  return out;
}

Json plan_to_json(const ExperimentPlan& plan) {
  Json j;
  j["base"] = detail::config_to_json_value(plan.base);
  j["sweep"] = {{"n", plan.n_values}, {"k", plan.k_values}, {"t", plan.t_values}};
  Json est = Json::array();
  for (auto e : plan.estimators) est.push_back(to_string(e));
  j["estimators"] = est;
  j["bounds"] = {{"C0", plan.bound_c0}, {"gamma", plan.bound_gamma}, {"M", plan.bound_m}};
  j["knn_neighbors"] = plan.knn_neighbors;
  j["tv_bins"] = plan.tv_bins;
  return j;
}

int severity_merge(int current, int code) {
  if (code == 0) return current;
  if (current == 0) return code;
  return std::min(current, code);
}

std::vector<std::size_t> sweep_steps(const ExperimentPlan& plan) {
  std::vector<std::size_t> steps;
  for (double t : plan.t_values) steps.push_back(plan.base.grid.nearest(t).step);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

double cascade_value(const ExperimentPlan& plan, std::size_t n, std::size_t k, double t) {
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double gamma = plan.bound_gamma;
  double dt = gamma > 0.0 ? 1.0 / (2.0 * gamma * static_cast<double>(n)) : 1.0;
  if (t > 0.0) dt = std::min(dt, t / 100.0);
  const auto h0 = chaotic_initial_entropy(plan.bound_c0, n);
  const auto env = hierarchy_ode_solve(n, plan.bound_m, gamma, h0, t, dt, 1u << 30);
  return env.at(env.times.size() - 1, k);
}

struct PointResult {
  std::vector<EntropyRow> entropy;
  std::vector<CheckRow> checks;
  std::vector<std::string> notes;
  int exit_code = 0;
};

PointResult run_point(const ExperimentPlan& plan, const MeanFieldLaw& law, std::size_t n, std::size_t threads) {
  PointResult out;
  SimConfig config = plan.base;
  config.n_particles = n;
  config.validate();
  const auto steps = sweep_steps(plan);
  const double eps = config.regularization_eps();
  const double dt = config.grid.dt();
  const Metric metric = config.on_torus() ? Metric::torus : Metric::euclidean;

  const bool sampled = plan.uses(EstimatorKind::knn) || plan.uses(EstimatorKind::histogram_tv);
  std::optional<ParticleEnsemble> system;
  if (sampled) {
    SimulationOptions sim_opts;
    sim_opts.threads = threads;
    sim_opts.record_steps = steps;
    system = simulate_particle_system(config, sim_opts);
  }

  std::optional<GirsanovWeight> weights;
  std::optional<ParticleEnsemble> copies;
  if (plan.uses(EstimatorKind::girsanov_full)) {
    GirsanovOptions g;
    g.threads = threads;
    g.record_steps = steps;
    g.keep_copies = sampled;
    weights = girsanov_weight(config, law, g);
    if (weights->copies) copies = std::move(weights->copies);
    weights->copies.reset();
  } else if (sampled) {
    ReferenceOptions ro;
    ro.threads = threads;
    ro.record_steps = steps;
    copies = sample_reference_copies(config, law, ro);
  }

  auto push = [&](EntropyReport rep) {
    if (!rep.reliable) out.exit_code = severity_merge(out.exit_code, 4);
    out.entropy.push_back({std::move(rep), eps, dt, config.seed});
  };

  for (double t_req : plan.t_values) {
    const double t = config.grid.time(config.grid.nearest(t_req).step);
    std::optional<EntropyReport> full;
    if (weights) {
      const auto mc = check_martingale(*weights, t);
      out.checks.push_back({"martingale", n, n, t, mc.mean, 1.0 + 3.0 * mc.std_error,
                            3.0 * mc.std_error - std::abs(mc.mean - 1.0), mc.pass});
      if (!mc.pass) out.exit_code = severity_merge(out.exit_code, 5);
      auto reports = entropy_girsanov(*weights, n, t);
      full = reports.front();
      push(reports.front());
    }
    for (std::size_t k : plan.k_values) {
      std::optional<EntropyReport> hk, tv;
      if (weights) {
        auto sub = *full;
        sub.kind = EstimatorKind::girsanov_subadditive;
        sub.k = k;
        const double ratio = static_cast<double>(k) / static_cast<double>(n);
        sub.value = ratio * full->value;
        sub.std_error = ratio * full->std_error;
        sub.notes = {"subadditivity surrogate (k/n) H_full"};
        push(sub);
      }
      if (!sampled) continue;
      const Marginal p = extract_marginal(*system, k, t);
      const Marginal q = extract_marginal(*copies, k, t);
      if (plan.uses(EstimatorKind::knn)) {
        EntropyReport rep = entropy_knn(p.samples, q.samples, plan.knn_neighbors, metric);
        rep.k = k;
        rep.n = n;
        rep.t = t;
        hk = rep;
        push(rep);
      }
      if (plan.uses(EstimatorKind::histogram_tv)) {
        if (k * config.dim > 4) {
          out.notes.push_back("n=" + std::to_string(n) + " k=" + std::to_string(k) +
                              ": TV histogram skipped, marginal dimension above 4");
        } else {
          const std::size_t bins = capped_tv_bins(plan.tv_bins, p.samples.rows, p.samples.cols);
          EntropyReport rep = tv_histogram(p.samples, q.samples, bins, std::nullopt, config.on_torus());
          rep.k = k;
          rep.n = n;
          rep.t = t;
          tv = rep;
          push(rep);
        }
      }
      if (hk && tv && full) {
        const double tol = combined_tolerance(*hk, *tv, *full);
        const auto c = pinsker_and_subadditivity_check(*hk, *tv, *full, tol);
        out.checks.push_back({"pinsker", n, k, t, tv->value, tv->value + c.pinsker_margin, c.pinsker_margin,
                              c.pinsker_pass});
        out.checks.push_back({"subadditivity", n, k, t, hk->value, hk->value + c.subadditivity_margin,
                              c.subadditivity_margin, c.subadditivity_pass});
        if (!c.pass) out.exit_code = severity_merge(out.exit_code, 5);
      }
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

bool ExperimentPlan::uses(EstimatorKind kind) const {
  return std::find(estimators.begin(), estimators.end(), kind) != estimators.end();
}

void ExperimentPlan::validate() const {
  base.validate();
  for (std::size_t n : n_values) {
    if (n < 2) throw ConfigError("plan: every n must be >= 2");
  }
  if (!n_values.empty()) {
    const std::size_t n_min = *std::min_element(n_values.begin(), n_values.end());
    for (std::size_t k : k_values) {
      if (k < 1 || k > n_min) throw ConfigError("plan: every k must satisfy 1 <= k <= n");
    }
  }
  for (double t : t_values) {
    const auto snap = base.grid.nearest(t);
    if (!snap.exact) throw ConfigError("plan: t = " + format_double(t) + " is not a grid time");
  }
  for (auto e : estimators) {
    if (e == EstimatorKind::girsanov_subadditive) {
      throw ConfigError("plan: girsanov_subadditive is reported with girsanov_full");
    }
  }
  if (knn_neighbors < 1) throw ConfigError("plan: knn_neighbors must be >= 1");
  if (tv_bins < 1) throw ConfigError("plan: tv_bins must be >= 1");
  if (!(bound_c0 >= 0.0) || !(bound_gamma >= 0.0) || !(bound_m >= 0.0)) {
    throw ConfigError("plan: bound parameters must be non-negative");
  }
}

ExperimentPlan parse_plan(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("plan: expected a JSON object");
  detail::reject_unknown_keys(j, {"base", "sweep", "estimators", "bounds", "knn_neighbors", "tv_bins", "output"},
                              "plan");
  if (!j.contains("base")) throw ConfigError("plan: missing key 'base'");
  ExperimentPlan plan;
  try {
    plan.base = detail::config_from_json(j.at("base"));
    if (j.contains("sweep")) {
      const Json& s = j.at("sweep");
      if (!s.is_object()) throw ConfigError("plan.sweep: expected an object");
      detail::reject_unknown_keys(s, {"n", "k", "t"}, "plan.sweep");
      if (s.contains("n")) plan.n_values = number_list<std::size_t>(s.at("n"), "plan.sweep.n");
      if (s.contains("k")) plan.k_values = number_list<std::size_t>(s.at("k"), "plan.sweep.k");
      if (s.contains("t")) plan.t_values = number_list<double>(s.at("t"), "plan.sweep.t");
    }
    if (j.contains("estimators")) {
      const Json& e = j.at("estimators");
      if (!e.is_array()) throw ConfigError("plan.estimators: expected a list");
      plan.estimators.clear();
      for (const auto& name : e) {
        if (!name.is_string()) throw ConfigError("plan.estimators: expected names");
        const auto kind = estimator_from_string(name.get<std::string>());
        if (!kind) throw ConfigError("plan.estimators: unknown estimator '" + name.get<std::string>() + "'");
        plan.estimators.push_back(*kind);
      }
    }
    if (j.contains("bounds")) {
      const Json& b = j.at("bounds");
      if (!b.is_object()) throw ConfigError("plan.bounds: expected an object");
      detail::reject_unknown_keys(b, {"C0", "gamma", "M"}, "plan.bounds");
      if (b.contains("C0")) plan.bound_c0 = b.at("C0").get<double>();
      if (b.contains("gamma")) plan.bound_gamma = b.at("gamma").get<double>();
      if (b.contains("M")) plan.bound_m = b.at("M").get<double>();
    }
    if (j.contains("knn_neighbors")) plan.knn_neighbors = j.at("knn_neighbors").get<std::size_t>();
    if (j.contains("tv_bins")) plan.tv_bins = j.at("tv_bins").get<std::size_t>();
    if (j.contains("output")) plan.output_dir = j.at("output").get<std::string>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plan file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_plan(buffer.str());
}

int exit_code_for(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return 2;
  } catch (const SimulationBlowUp&) {
    return 3;
  } catch (const EstimatorError&) {
    return 4;
  } catch (...) {
    return 1;
  }
}

ExperimentReport run_experiment(const ExperimentPlan& plan, std::size_t threads) {
  plan.validate();
  ExperimentReport report;
  if (plan.empty()) return report;

  PicardOptions po;
  po.threads = threads;
  const MeanFieldLaw law = solve_mckean_vlasov_picard(plan.base, po);
  report.picard_residuals = law.residuals;
  report.picard_noise_floors = law.noise_floors;
  report.picard_converged = law.converged;
  if (!law.converged) report.notes.emplace_back("Picard residuals rose above the Monte Carlo floor");

  for (std::size_t n : plan.n_values) {
    try {
      PointResult r = run_point(plan, law, n, threads);
      for (auto& e : r.entropy) report.entropy.push_back(std::move(e));
      for (auto& c : r.checks) report.checks.push_back(std::move(c));
      for (auto& note : r.notes) report.notes.push_back(std::move(note));
      report.exit_code = severity_merge(report.exit_code, r.exit_code);
    } catch (const std::exception& e) {
      const int code = exit_code_for(std::current_exception());
      report.failures.push_back({n, code, e.what()});
      report.exit_code = severity_merge(report.exit_code, code);
    }
    for (std::size_t k : plan.k_values) {
      for (double t_req : plan.t_values) {
        const double t = plan.base.grid.time(plan.base.grid.nearest(t_req).step);
        BoundRow b;
        b.n = n;
        b.k = k;
        b.t = t;
        b.c = constant_C(plan.bound_c0, plan.bound_gamma, plan.bound_m, t);
        b.closed_form = theorem_bound(b.c, plan.bound_gamma, t, n, k);
        try {
          b.cascade = cascade_value(plan, n, k, t);
        } catch (const EstimatorError&) {
          b.cascade = std::numeric_limits<double>::quiet_NaN();
        }
        b.gamma = plan.bound_gamma;
        b.m = plan.bound_m;
        report.bounds.push_back(b);
      }
    }
  }

  // Rate fits over n at fixed (estimator, k, t) and over k at fixed (estimator, n, t).
  std::map<std::tuple<std::string, std::size_t, double>, std::vector<std::pair<double, double>>> by_n, by_k;
  for (const auto& row : report.entropy) {
    const auto& r = row.report;
    if (r.kind == EstimatorKind::girsanov_full || r.kind == EstimatorKind::histogram_tv) continue;
    const std::string name = to_string(r.kind);
    by_n[{name, r.k, r.t}].emplace_back(static_cast<double>(r.n), r.value);
    by_k[{name, r.n, r.t}].emplace_back(static_cast<double>(r.k), r.value);
  }
  auto fit_all = [&](const auto& groups, RateAxis axis) {
    for (const auto& [key, points] : groups) {
      if (points.size() < 3) continue;
      const auto& [name, fixed, t] = key;
      try {
        report.fits.push_back({name, fixed, t, fit_rate(points, axis)});
      } catch (const EstimatorError& e) {
        report.notes.push_back(name + " " + to_string(axis) + " fit at fixed " + std::to_string(fixed) +
                               ", t=" + format_double(t) + ": " + e.what());
      }
    }
  };
  fit_all(by_n, RateAxis::n_at_fixed_k);
  fit_all(by_k, RateAxis::k_at_fixed_n);
  return report;
}

void write_report(const ExperimentPlan& plan, const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (!plan.empty()) {
    std::ofstream out(dir / "entropy.csv");
    CsvWriter csv(out, {"t", "n", "k", "estimator", "value", "stderr", "ess", "eps", "dt", "seed"});
    for (const auto& row : report.entropy) {
      const auto& r = row.report;
      auto line = csv.row();
      line << r.t << r.n << r.k << to_string(r.kind) << r.value << r.std_error << r.ess << row.eps << row.dt
           << row.seed;
      line.end();
    }
  }
  if (!plan.empty()) {
    std::ofstream out(dir / "bounds.csv");
    CsvWriter csv(out, {"n", "k", "t", "closed_form", "cascade", "C", "gamma", "M"});
    for (const auto& b : report.bounds) {
      auto row = csv.row();
      row << b.n << b.k << b.t << b.closed_form << b.cascade << b.c << b.gamma << b.m;
      row.end();
    }
  }
  if (!plan.empty()) {
    std::ofstream out(dir / "checks.csv");
    CsvWriter csv(out, {"check", "n", "k", "t", "observed", "allowed", "margin", "pass"});
    for (const auto& c : report.checks) {
      auto row = csv.row();
      row << c.check << c.n << c.k << c.t << c.observed << c.allowed << c.margin << c.pass;
      row.end();
    }
  }
  if (!plan.empty()) {
    std::ofstream out(dir / "rate_fit.csv");
    CsvWriter csv(out, {"estimator", "axis", "fixed", "t", "slope", "intercept", "r2", "used", "excluded", "flagged"});
    for (const auto& f : report.fits) {
      auto row = csv.row();
      row << f.estimator << to_string(f.fit.axis) << f.fixed << f.t << f.fit.slope << f.fit.intercept << f.fit.r2
          << f.fit.used << f.fit.excluded << f.fit.flagged;
      row.end();
    }
  }
  Json m;
  m["plan"] = plan_to_json(plan);
  m["seed"] = plan.base.seed;
  m["dt"] = plan.base.grid.dt();
  m["eps"] = plan.base.regularization_eps();
  m["lattice_radius"] = plan.base.numerics.lattice_radius;
  m["replicas"] = plan.base.replicas;
  m["estimator_params"] = {{"knn_neighbors", plan.knn_neighbors},
                           {"tv_bins", plan.tv_bins},
                           {"girsanov_min_replicas", 1000},
                           {"ess_floor_fraction", 0.05}};
  m["picard"] = {{"samples", plan.base.mean_field.samples},
                 {"iterations", plan.base.mean_field.iterations},
                 {"residuals", report.picard_residuals},
                 {"noise_floors", report.picard_noise_floors},
                 {"converged", report.picard_converged}};
  Json failures = Json::array();
  for (const auto& f : report.failures) failures.push_back({{"n", f.n}, {"exit_code", f.exit_code}, {"error", f.message}});
  m["failures"] = failures;
  m["notes"] = report.notes;
  m["exit_code"] = report.exit_code;
  m["files"] = plan.empty() ? Json::array() : Json{"entropy.csv", "bounds.csv", "checks.csv", "rate_fit.csv"};
  m["versions"] = library_versions();
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace mfchaos
