#include "mfchaos/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "engine.hpp"
#include "mfchaos/drift.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/parallel.hpp"
#include "mfchaos/torus.hpp"

namespace mfchaos {

namespace {

std::vector<std::size_t> normalized_steps(const TimeGrid& grid, std::vector<std::size_t> steps) {
  if (steps.empty()) return strided_steps(grid, 1);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  if (steps.back() > grid.steps()) throw ConfigError("record step beyond the grid");
  return steps;
}

}  // namespace

std::vector<std::size_t> strided_steps(const TimeGrid& grid, std::size_t every) {
  if (every == 0) throw ConfigError("record stride must be >= 1");
  std::vector<std::size_t> steps;
  for (std::size_t s = 0; s <= grid.steps(); s += every) steps.push_back(s);
  if (steps.back() != grid.steps()) steps.push_back(grid.steps());
  return steps;
}

std::optional<std::size_t> ParticleEnsemble::record_index(std::size_t step) const {
  const auto it = std::lower_bound(recorded_steps.begin(), recorded_steps.end(), step);
  if (it == recorded_steps.end() || *it != step) return std::nullopt;
  return static_cast<std::size_t>(it - recorded_steps.begin());
}

ParticleEnsemble simulate_particle_system(const SimConfig& config, const SimulationOptions& options) {
  config.validate();
  const DriftSpec drift = make_drift(config);
  const auto fbm = detail::make_fbm_generator(config);

  ParticleEnsemble ens;
  ens.replicas = config.replicas;
  ens.n = config.n_particles;
  ens.dim = config.dim;
  ens.grid = config.grid;
  ens.domain = config.domain;
  ens.recorded_steps = normalized_steps(config.grid, options.record_steps);
  ens.states.assign(ens.replicas * ens.recorded_steps.size() * ens.n * ens.dim, 0.0);
  ens.eps = config.regularization_eps();
  ens.lattice_radius = config.numerics.lattice_radius;
  ens.hurst = config.effective_hurst();
  ens.noise_scale = config.noise_scale;
  ens.b0 = config.b0.name;
  ens.interaction = config.interaction.name;
  ens.fbm_fallback = fbm && fbm->used_fallback();

  const std::size_t n = ens.n;
  const std::size_t d = ens.dim;
  const std::size_t nd = n * d;
  const std::size_t steps = config.grid.steps();
  const double dt = config.grid.dt();
  const double sigma = config.noise_scale;
  const bool full_history = !drift.state_dependent;

  parallel_for(ens.replicas, options.threads, [&](std::size_t r) {
    std::vector<double> history(full_history ? (steps + 1) * nd : nd);
    std::vector<double> b0v(d), inter(nd), dB(nd);
    for (std::size_t i = 0; i < n; ++i) {
      detail::draw_initial(config, config.seed, r, i, std::span<double>(history).subspan(i * d, d));
    }
    detail::IncrementSource noise(config, fbm.get(), config.seed, r, 0, n);
    std::size_t next_record = 0;
    auto record = [&](std::size_t k, const double* x) {
      if (next_record < ens.recorded_steps.size() && ens.recorded_steps[next_record] == k) {
        std::copy(x, x + nd, ens.states.begin() + static_cast<std::ptrdiff_t>(
                                                      (r * ens.recorded_steps.size() + next_record) * nd));
        ++next_record;
      }
    };
    record(0, history.data());
    for (std::size_t k = 0; k < steps; ++k) {
      const std::size_t local = full_history ? k : 0;
      const double t = config.grid.time(k);
      const Population pop{history.data(), n, d, local, k, t};
      drift.interaction->population_average(pop, inter);
      noise.next(k, dB);
      double* cur = history.data() + local * nd;
      double* nxt = full_history ? cur + nd : cur;
      for (std::size_t i = 0; i < n; ++i) {
        drift.b0->evaluate(pop.particle(i), b0v);
        for (std::size_t c = 0; c < d; ++c) {
          const std::size_t q = i * d + c;
          nxt[q] = cur[q] + (b0v[c] + inter[q]) * dt + sigma * dB[q];
        }
        if (config.on_torus()) wrap_in_place({nxt + i * d, d});
        if (!detail::all_finite({nxt + i * d, d})) throw SimulationBlowUp(k + 1, i, r);
      }
      record(k + 1, nxt);
    }
  });
  return ens;
}

Marginal extract_marginal(const ParticleEnsemble& ensemble, std::size_t k, double t) {
  if (k < 1 || k > ensemble.n) throw DomainError("extract_marginal: k must lie in [1, n]");
  if (ensemble.recorded_steps.empty()) throw DomainError("extract_marginal: nothing recorded");
  const double pos = (t - ensemble.grid.t0()) / ensemble.grid.dt();
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ensemble.recorded_steps.size(); ++i) {
    const double gap = std::abs(static_cast<double>(ensemble.recorded_steps[i]) - pos);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  Marginal m;
  m.step = ensemble.recorded_steps[best];
  m.time = ensemble.grid.time(m.step);
  m.snapped = best_gap > 1e-9;
  m.samples = SampleMatrix(ensemble.replicas, k * ensemble.dim);
  for (std::size_t r = 0; r < ensemble.replicas; ++r) {
    auto row = m.samples.row(r);
    for (std::size_t i = 0; i < k; ++i) {
      const auto s = ensemble.state(r, best, i);
      std::copy(s.begin(), s.end(), row.begin() + static_cast<std::ptrdiff_t>(i * ensemble.dim));
    }
  }
  return m;
}

}  // namespace mfchaos
