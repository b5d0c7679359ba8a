#include "mfchaos/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "engine.hpp"
#include "mfchaos/drift.hpp"
#include "mfchaos/errors.hpp"
#include "mfchaos/parallel.hpp"
#include "mfchaos/torus.hpp"

namespace mfchaos {

namespace {

constexpr std::size_t kChunk = 256;

std::vector<std::size_t> check_steps(const TimeGrid& grid, std::size_t points) {
  std::vector<std::size_t> steps;
  const std::size_t count = std::max<std::size_t>(points, 1);
  for (std::size_t i = 1; i <= count; ++i) {
    const std::size_t s = (grid.steps() * i) / count;
    if (s > 0 && (steps.empty() || steps.back() != s)) steps.push_back(s);
  }
  return steps;
}

std::vector<double> coordinate(const MeanFieldLaw& law, std::size_t step, std::size_t c,
                               std::size_t begin, std::size_t end) {
  std::vector<double> v;
  v.reserve(end - begin);
  for (std::size_t j = begin; j < end; ++j) v.push_back(law.state(step, j)[c]);
  return v;
}

double law_gap(const MeanFieldLaw& a, const MeanFieldLaw& b, const std::vector<std::size_t>& steps) {
  double gap = 0.0;
  for (std::size_t s : steps) {
    for (std::size_t c = 0; c < a.dim; ++c) {
      gap = std::max(gap, wasserstein1_sorted(coordinate(a, s, c, 0, a.samples),
                                              coordinate(b, s, c, 0, b.samples)));
    }
  }
  return gap;
}

double split_half_gap(const MeanFieldLaw& a, const std::vector<std::size_t>& steps) {
  const std::size_t half = a.samples / 2;
  double gap = 0.0;
  for (std::size_t s : steps) {
    for (std::size_t c = 0; c < a.dim; ++c) {
      gap = std::max(gap, wasserstein1_sorted(coordinate(a, s, c, 0, half),
                                              coordinate(a, s, c, half, 2 * half)));
    }
  }
  return gap;
}

// One Picard iterate: m fresh paths driven by b0 plus the averager (if any).
void run_iterate(const SimConfig& config, const DriftSpec& drift, const FbmGenerator* fbm,
                 const LawAverager* averager, std::uint64_t seed, std::size_t threads,
                 MeanFieldLaw& out) {
  const std::size_t m = out.samples;
  const std::size_t d = out.dim;
  const std::size_t steps = config.grid.steps();
  const double dt = config.grid.dt();
  const double sigma = config.noise_scale;
  const std::size_t stride = m * d;
  const std::size_t chunks = (m + kChunk - 1) / kChunk;

  parallel_for(chunks, threads, [&](std::size_t chunk) {
    const std::size_t first = chunk * kChunk;
    const std::size_t count = std::min(kChunk, m - first);
    double* base = out.states.data();
    for (std::size_t p = first; p < first + count; ++p) {
      detail::draw_initial(config, seed, 0, p, {base + p * d, d});
    }
    detail::IncrementSource noise(config, fbm, seed, 0, first, count);
    std::vector<double> dB(count * d), b0v(d), avg(d, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
      noise.next(k, dB);
      const double t = config.grid.time(k);
      for (std::size_t q = 0; q < count; ++q) {
        const std::size_t p = first + q;
        const PathView x(base + p * d, stride, d, k, t);
        drift.b0->evaluate(x, b0v);
        if (averager != nullptr) averager->average(k, x, avg);
        const double* cur = base + k * stride + p * d;
        double* nxt = base + (k + 1) * stride + p * d;
        for (std::size_t c = 0; c < d; ++c) {
          nxt[c] = cur[c] + (b0v[c] + avg[c]) * dt + sigma * dB[q * d + c];
        }
        if (config.on_torus()) wrap_in_place({nxt, d});
        if (!detail::all_finite({nxt, d})) throw SimulationBlowUp(k + 1, p, 0);
      }
    }
  });
}

}  // namespace

double wasserstein1_sorted(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size() || a.empty()) throw DomainError("wasserstein1_sorted: sizes must match");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

MeanFieldLaw solve_mckean_vlasov_picard(const SimConfig& config, const PicardOptions& options) {
  config.validate();
  const std::size_t m = options.samples != 0 ? options.samples : config.mean_field.samples;
  const std::size_t iters = options.iterations != 0 ? options.iterations : config.mean_field.iterations;
  if (m < 2) throw ConfigError("Picard solver needs at least 2 samples");
  const DriftSpec drift = make_drift(config);
  const auto fbm = detail::make_fbm_generator(config);
  const auto checks = check_steps(config.grid, options.check_points);

  auto fresh = [&] {
    MeanFieldLaw law;
    law.grid = config.grid;
    law.samples = m;
    law.dim = config.dim;
    law.states.assign(config.grid.points() * m * config.dim, 0.0);
    return law;
  };

  MeanFieldLaw prev = fresh();
  run_iterate(config, drift, fbm.get(), nullptr, derive_seed(config.seed, kPicardSeedTag), options.threads,
              prev);
  std::vector<double> residuals, floors;
  bool converged = true;
  for (std::size_t j = 1; j <= iters; ++j) {
    const auto averager = drift.interaction->averager(prev.states.data(), m, config.dim, config.grid,
                                                      config.mean_field.average_cap);
    MeanFieldLaw cur = fresh();
    run_iterate(config, drift, fbm.get(), averager.get(), derive_seed(config.seed, kPicardSeedTag + j),
                options.threads, cur);
    residuals.push_back(law_gap(cur, prev, checks));
    floors.push_back(split_half_gap(cur, checks));
    if (residuals.size() >= 2 && residuals.back() > residuals[residuals.size() - 2] + floors.back()) {
      converged = false;
    }
    prev = std::move(cur);
  }
  prev.iterations = iters;
  prev.residuals = std::move(residuals);
  prev.noise_floors = std::move(floors);
  prev.converged = converged;
  return prev;
}

ParticleEnsemble sample_reference_copies(const SimConfig& config, const MeanFieldLaw& law,
                                         const ReferenceOptions& options) {
  config.validate();
  if (!(law.grid == config.grid) || law.dim != config.dim) {
    throw ConfigError("reference copies: law grid or dimension does not match the config");
  }
  const DriftSpec drift = make_drift(config);
  const auto fbm = detail::make_fbm_generator(config);
  const auto averager = drift.interaction->averager(law.states.data(), law.samples, law.dim, law.grid,
                                                    config.mean_field.average_cap);
  const std::uint64_t seed = derive_seed(config.seed, kReferenceSeedTag);

  ParticleEnsemble ens;
  ens.replicas = options.replicas != 0 ? options.replicas : config.replicas;
  ens.n = options.n != 0 ? options.n : config.n_particles;
  ens.dim = config.dim;
  ens.grid = config.grid;
  ens.domain = config.domain;
  ens.recorded_steps = options.record_steps;
  if (ens.recorded_steps.empty()) ens.recorded_steps = strided_steps(config.grid, 1);
  std::sort(ens.recorded_steps.begin(), ens.recorded_steps.end());
  ens.recorded_steps.erase(std::unique(ens.recorded_steps.begin(), ens.recorded_steps.end()),
                           ens.recorded_steps.end());
  if (ens.recorded_steps.back() > config.grid.steps()) throw ConfigError("record step beyond the grid");
  ens.states.assign(ens.replicas * ens.recorded_steps.size() * ens.n * ens.dim, 0.0);
  ens.eps = config.regularization_eps();
  ens.lattice_radius = config.numerics.lattice_radius;
  ens.hurst = config.effective_hurst();
  ens.noise_scale = config.noise_scale;
  ens.b0 = config.b0.name;
  ens.interaction = "mean_field:" + config.interaction.name;
  ens.fbm_fallback = fbm && fbm->used_fallback();

  const std::size_t n = ens.n;
  const std::size_t d = ens.dim;
  const std::size_t nd = n * d;
  const std::size_t steps = config.grid.steps();
  const double dt = config.grid.dt();
  const double sigma = config.noise_scale;

  parallel_for(ens.replicas, options.threads, [&](std::size_t r) {
    std::vector<double> history((steps + 1) * nd);
    for (std::size_t i = 0; i < n; ++i) detail::draw_initial(config, seed, r, i, {history.data() + i * d, d});
    detail::IncrementSource noise(config, fbm.get(), seed, r, 0, n);
    std::vector<double> dB(nd), b0v(d), avg(d);
    std::size_t next_record = 0;
    auto record = [&](std::size_t k) {
      if (next_record < ens.recorded_steps.size() && ens.recorded_steps[next_record] == k) {
        std::copy_n(history.data() + k * nd, nd,
                    ens.states.begin() +
                        static_cast<std::ptrdiff_t>((r * ens.recorded_steps.size() + next_record) * nd));
        ++next_record;
      }
    };
    record(0);
    for (std::size_t k = 0; k < steps; ++k) {
      noise.next(k, dB);
      const double t = config.grid.time(k);
      for (std::size_t i = 0; i < n; ++i) {
        const PathView x(history.data() + i * d, nd, d, k, t);
        drift.b0->evaluate(x, b0v);
        averager->average(k, x, avg);
        const double* cur = history.data() + k * nd + i * d;
        double* nxt = history.data() + (k + 1) * nd + i * d;
        for (std::size_t c = 0; c < d; ++c) nxt[c] = cur[c] + (b0v[c] + avg[c]) * dt + sigma * dB[i * d + c];
        if (config.on_torus()) wrap_in_place({nxt, d});
        if (!detail::all_finite({nxt, d})) throw SimulationBlowUp(k + 1, i, r);
      }
      record(k + 1);
    }
  });
  return ens;
}

}  // namespace mfchaos
