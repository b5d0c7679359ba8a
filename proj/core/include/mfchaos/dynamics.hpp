#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/time_grid.hpp"

namespace mfchaos {

/// Row-major sample matrix.
struct SampleMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  SampleMatrix() = default;
  SampleMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<const double> row(std::size_t r) const noexcept { return {data.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) noexcept { return {data.data() + r * cols, cols}; }
};

/// States of `replicas` independent n-particle systems at the recorded grid
/// steps, laid out [replica][record][particle][coordinate].
struct ParticleEnsemble {
  std::size_t replicas = 0;
  std::size_t n = 0;
  std::size_t dim = 0;
  TimeGrid grid{0.0, 1.0, 1};
  DomainKind domain = DomainKind::torus;
  std::vector<std::size_t> recorded_steps;  // strictly increasing
  std::vector<double> states;

  // Numerical provenance.
  double eps = 0.0;
  int lattice_radius = 0;
  double hurst = 0.5;
  double noise_scale = 1.0;
  std::string b0;
  std::string interaction;
  bool fbm_fallback = false;

  std::optional<std::size_t> record_index(std::size_t step) const;
  std::span<const double> state(std::size_t replica, std::size_t record, std::size_t particle) const {
    return {states.data() + ((replica * recorded_steps.size() + record) * n + particle) * dim, dim};
  }
  std::span<double> state(std::size_t replica, std::size_t record, std::size_t particle) {
    return {states.data() + ((replica * recorded_steps.size() + record) * n + particle) * dim, dim};
  }
};

struct SimulationOptions {
  std::size_t threads = 0;                  // 0: default thread count
  std::vector<std::size_t> record_steps;    // empty: every grid step
};

/// Euler-Maruyama for
///   dX^i = (b0(t, X^i) + (n-1)^{-1} sum_{j != i} b(t, X^i, X^j)) dt + scale dB^i
/// over config.replicas independent replicas. Replica r, particle i draws
/// from streams keyed (seed, r, i, .), so results do not depend on the thread
/// count. Torus positions are wrapped after every step. Throws
/// SimulationBlowUp on the first non-finite state (lowest replica).
ParticleEnsemble simulate_particle_system(const SimConfig& config,
                                          const SimulationOptions& options = {});

/// The first k particles per replica at time t.
struct Marginal {
  SampleMatrix samples;  // replicas x (k * dim)
  std::size_t step = 0;
  double time = 0.0;
  bool snapped = false;  // t was not a recorded grid time
};

/// Throws DomainError unless 1 <= k <= n. An off-grid or unrecorded t snaps
/// to the nearest recorded step and sets `snapped`.
Marginal extract_marginal(const ParticleEnsemble& ensemble, std::size_t k, double t);

/// Every step, or `every`-th step plus the terminal one.
std::vector<std::size_t> strided_steps(const TimeGrid& grid, std::size_t every);

}  // namespace mfchaos
