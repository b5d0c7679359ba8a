#include "mfchaos/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "engine.hpp"
#include "mfchaos/drift.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/parallel.hpp"
#include "mfchaos/torus.hpp"
#include "mfchaos/volterra.hpp"

namespace mfchaos {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// sum_{k < s} of per-step exponent terms, read off at the recorded steps.
void cumulate(const std::vector<double>& per_step, const std::vector<std::size_t>& records,
              std::size_t scale, double* out) {
  double acc = 0.0;
  std::size_t k = 0;
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r] % scale != 0) {
      out[r] = kNaN;
      continue;
    }
    const std::size_t target = records[r] / scale;
    while (k < target) acc += per_step[k++];
    out[r] = acc;
  }
}

}  // namespace

std::optional<std::size_t> GirsanovWeight::record_index(std::size_t step) const {
  const auto it = std::lower_bound(recorded_steps.begin(), recorded_steps.end(), step);
  if (it == recorded_steps.end() || *it != step) return std::nullopt;
  return static_cast<std::size_t>(it - recorded_steps.begin());
}

std::size_t GirsanovWeight::nearest_record(double t) const {
  const double pos = (t - grid.t0()) / grid.dt();
  std::size_t best = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < recorded_steps.size(); ++i) {
    const double g = std::abs(static_cast<double>(recorded_steps[i]) - pos);
    if (g < gap) {
      gap = g;
      best = i;
    }
  }
  return best;
}

double accumulate_log_weight(std::span<const double> u, std::span<const double> dW, double dt) {
  if (u.size() != dW.size()) throw DomainError("accumulate_log_weight: length mismatch");
  double acc = 0.0;
  for (std::size_t q = 0; q < u.size(); ++q) acc += u[q] * dW[q] - 0.5 * u[q] * u[q] * dt;
  return acc;
}

GirsanovWeight girsanov_weight(const SimConfig& config, const MeanFieldLaw& law,
                               const GirsanovOptions& options) {
  config.validate();
  if (!(config.noise_scale > 0.0)) throw ConfigError("Girsanov weight needs a positive noise scale");
  if (!(law.grid == config.grid) || law.dim != config.dim) {
    throw ConfigError("Girsanov weight: law grid or dimension does not match the config");
  }
  const DriftSpec drift = make_drift(config);
  const auto fbm = detail::make_fbm_generator(config);
  const auto averager = drift.interaction->averager(law.states.data(), law.samples, law.dim, law.grid,
                                                    config.mean_field.average_cap);
  const std::uint64_t seed = derive_seed(config.seed, kReferenceSeedTag);
  const bool fractional = config.noise == NoiseKind::fbm && config.hurst != 0.5;

  GirsanovWeight w;
  w.replicas = options.replicas != 0 ? options.replicas : config.replicas;
  w.n = options.n != 0 ? options.n : config.n_particles;
  if (w.n < 2) throw ConfigError("Girsanov weight needs n >= 2");
  w.grid = config.grid;
  w.recorded_steps = options.record_steps;
  if (w.recorded_steps.empty()) w.recorded_steps = strided_steps(config.grid, 1);
  std::sort(w.recorded_steps.begin(), w.recorded_steps.end());
  w.recorded_steps.erase(std::unique(w.recorded_steps.begin(), w.recorded_steps.end()), w.recorded_steps.end());
  if (w.recorded_steps.back() > config.grid.steps()) throw ConfigError("record step beyond the grid");
  const std::size_t nrec = w.recorded_steps.size();
  w.log_z.assign(w.replicas * nrec, 0.0);
  w.energy.assign(w.replicas * nrec, 0.0);
  w.exact = !fractional;
  w.hurst = config.effective_hurst();
  w.eps = config.regularization_eps();

  const std::size_t steps = config.grid.steps();
  const bool coarse = fractional && steps % 2 == 0 && steps >= 2;
  if (fractional) w.log_z_coarse.assign(w.replicas * nrec, kNaN);

  std::optional<VolterraTransform> fine_v, coarse_v;
  if (fractional) {
    fine_v.emplace(config.hurst, config.grid);
    if (coarse) coarse_v.emplace(config.hurst, config.grid.coarsened());
  }

  if (options.keep_copies) {
    ParticleEnsemble ens;
    ens.replicas = w.replicas;
    ens.n = w.n;
    ens.dim = config.dim;
    ens.grid = config.grid;
    ens.domain = config.domain;
    ens.recorded_steps = w.recorded_steps;
    ens.states.assign(w.replicas * nrec * w.n * config.dim, 0.0);
    ens.eps = w.eps;
    ens.lattice_radius = config.numerics.lattice_radius;
    ens.hurst = w.hurst;
    ens.noise_scale = config.noise_scale;
    ens.b0 = config.b0.name;
    ens.interaction = "mean_field:" + config.interaction.name;
    ens.fbm_fallback = fbm && fbm->used_fallback();
    w.copies = std::move(ens);
  }

  const std::size_t n = w.n;
  const std::size_t d = config.dim;
  const std::size_t nd = n * d;
  const double dt = config.grid.dt();
  const double sigma = config.noise_scale;

  parallel_for(w.replicas, options.threads, [&](std::size_t r) {
    std::vector<double> history((steps + 1) * nd);
    for (std::size_t i = 0; i < n; ++i) detail::draw_initial(config, seed, r, i, {history.data() + i * d, d});
    detail::IncrementSource noise(config, fbm.get(), seed, r, 0, n);
    std::vector<double> dB(nd), b0v(d), avg(nd), inter(nd);
    // fBm: rates u[(i * d + c) * steps + k] for the Volterra transform.
    std::vector<double> rates(fractional ? nd * steps : 0);
    std::vector<double> per_step(steps, 0.0);
    std::vector<double> energy_step(steps, 0.0);

    double* log_z = w.log_z.data() + r * nrec;
    double* energy = w.energy.data() + r * nrec;
    std::size_t next_record = 0;
    auto record_state = [&](std::size_t k) {
      if (!w.copies) return;
      if (next_record < nrec && w.recorded_steps[next_record] == k) {
        std::copy_n(history.data() + k * nd, nd,
                    w.copies->states.begin() + static_cast<std::ptrdiff_t>((r * nrec + next_record) * nd));
        ++next_record;
      }
    };
    record_state(0);

    for (std::size_t k = 0; k < steps; ++k) {
      noise.next(k, dB);
      const double t = config.grid.time(k);
      const Population pop{history.data(), n, d, k, k, t};
      drift.interaction->population_average(pop, inter);
      double term = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const PathView x = pop.particle(i);
        averager->average(k, x, {avg.data() + i * d, d});
        double e = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const std::size_t q = i * d + c;
          const double delta = inter[q] - avg[q];
          const double u = delta / sigma;
          if (fractional) {
            rates[q * steps + k] = u;
          } else {
            // dB = sqrt(dt) N(0, 1) is the Brownian increment driving copy i.
            term += u * dB[q] - 0.5 * u * u * dt;
          }
          e += delta * delta;
        }
        if (i == 0) energy_step[k] = e * dt;
      }
      per_step[k] = term;
      for (std::size_t i = 0; i < n; ++i) {
        drift.b0->evaluate(pop.particle(i), b0v);
        const double* cur = history.data() + k * nd + i * d;
        double* nxt = history.data() + (k + 1) * nd + i * d;
        for (std::size_t c = 0; c < d; ++c) {
          nxt[c] = cur[c] + (b0v[c] + avg[i * d + c]) * dt + sigma * dB[i * d + c];
        }
        if (config.on_torus()) wrap_in_place({nxt, d});
        if (!detail::all_finite({nxt, d})) throw SimulationBlowUp(k + 1, i, r);
      }
      record_state(k + 1);
    }

    if (fractional) {
      detail::IncrementSource wsrc(config, nullptr, seed, r, 0, n, kStreamGirsanovW, true);
      std::vector<double> dW(nd * steps);  // [step][q]
      for (std::size_t k = 0; k < steps; ++k) wsrc.next(k, {dW.data() + k * nd, nd});
      std::fill(per_step.begin(), per_step.end(), 0.0);
      const std::size_t half = steps / 2;
      std::vector<double> per_coarse(coarse ? half : 0, 0.0);
      std::vector<double> u2(half);
      for (std::size_t q = 0; q < nd; ++q) {
        const std::span<const double> u(rates.data() + q * steps, steps);
        const auto dk = fine_v->apply_to_rate(u);
        for (std::size_t k = 0; k < steps; ++k) {
          const double wq = dW[k * nd + q];
          per_step[k] += dk[k] * wq - 0.5 * dk[k] * dk[k] * dt;
        }
        if (coarse) {
          for (std::size_t k = 0; k < half; ++k) u2[k] = 0.5 * (u[2 * k] + u[2 * k + 1]);
          const auto dk2 = coarse_v->apply_to_rate(u2);
          for (std::size_t k = 0; k < half; ++k) {
            const double wq = dW[2 * k * nd + q] + dW[(2 * k + 1) * nd + q];
            per_coarse[k] += dk2[k] * wq - dk2[k] * dk2[k] * dt;
          }
        }
      }
      if (coarse) cumulate(per_coarse, w.recorded_steps, 2, w.log_z_coarse.data() + r * nrec);
    }
    cumulate(per_step, w.recorded_steps, 1, log_z);
    cumulate(energy_step, w.recorded_steps, 1, energy);
  });
  return w;
}

MartingaleCheck check_martingale(std::span<const double> log_z) {
  if (log_z.size() < 2) throw EstimatorError("martingale check needs at least 2 replicas");
  const double count = static_cast<double>(log_z.size());
  double mean = 0.0;
  for (double l : log_z) mean += std::exp(l);
  mean /= count;
  double var = 0.0;
  for (double l : log_z) {
    const double z = std::exp(l) - mean;
    var += z * z;
  }
  var /= count - 1.0;
  MartingaleCheck check;
  check.mean = mean;
  check.std_error = std::sqrt(var / count);
  check.z_score = check.std_error > 0.0 ? (mean - 1.0) / check.std_error : (mean == 1.0 ? 0.0 : kNaN);
  check.pass = std::abs(mean - 1.0) <= 3.0 * check.std_error || mean == 1.0;
  return check;
}

MartingaleCheck check_martingale(const GirsanovWeight& weights, double t) {
  return check_martingale(log_weights_at(weights, weights.nearest_record(t)));
}

std::vector<double> log_weights_at(const GirsanovWeight& weights, std::size_t record) {
  std::vector<double> out(weights.replicas);
  for (std::size_t r = 0; r < weights.replicas; ++r) out[r] = weights.log_weight(r, record);
  return out;
}

std::vector<double> coarse_log_weights_at(const GirsanovWeight& weights, std::size_t record) {
  if (weights.log_z_coarse.empty()) return {};
  std::vector<double> out(weights.replicas);
  for (std::size_t r = 0; r < weights.replicas; ++r) {
    out[r] = weights.log_z_coarse[r * weights.recorded_steps.size() + record];
  }
  return out;
}

}  // namespace mfchaos
