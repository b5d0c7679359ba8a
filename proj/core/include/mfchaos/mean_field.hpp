#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/dynamics.hpp"
#include "mfchaos/time_grid.hpp"

namespace mfchaos {

/// m independent paths approximating the McKean-Vlasov law, every grid
/// point stored, laid out [point][sample][coordinate].
struct MeanFieldLaw {
  TimeGrid grid{0.0, 1.0, 1};
  std::size_t samples = 0;
  std::size_t dim = 0;
  std::vector<double> states;

  std::size_t iterations = 0;
  /// residuals[j-1]: W1 gap between iterates j and j-1, max over coordinates
  /// and check steps.
  std::vector<double> residuals;
  /// Split-half W1 of iterate j: the Monte Carlo floor of residuals[j-1].
  std::vector<double> noise_floors;
  /// False when some residual exceeds its predecessor by more than the noise
  /// floor.
  bool converged = true;

  std::span<const double> state(std::size_t step, std::size_t sample) const {
    return {states.data() + (step * samples + sample) * dim, dim};
  }
};

struct PicardOptions {
  std::size_t samples = 0;      // 0: config.mean_field.samples
  std::size_t iterations = 0;   // 0: config.mean_field.iterations
  std::size_t threads = 0;
  std::size_t check_points = 10;  // evenly spaced residual checks
};

/// Picard iteration over empirical laws. Iterate 0 solves the SDE with b0
/// only; iterate j drives m fresh paths with b0 + <mu^{(j-1)}_t, b(t, x, .)>.
MeanFieldLaw solve_mckean_vlasov_picard(const SimConfig& config, const PicardOptions& options = {});

/// Mean W1 distance between the empirical laws of two equally sized samples
/// of one coordinate.
double wasserstein1_sorted(std::vector<double> a, std::vector<double> b);

struct ReferenceOptions {
  std::size_t replicas = 0;  // 0: config.replicas
  std::size_t n = 0;         // 0: config.n_particles
  std::size_t threads = 0;
  std::vector<std::size_t> record_steps;  // empty: every step
};

/// replicas x n independent copies of the limit SDE driven by `law`, with
/// streams keyed by derive_seed(config.seed, kReferenceSeedTag). The copies
/// are the samples of mu^{(x)n} used by the Girsanov estimator.
ParticleEnsemble sample_reference_copies(const SimConfig& config, const MeanFieldLaw& law,
                                         const ReferenceOptions& options = {});

inline constexpr std::uint64_t kPicardSeedTag = 0x1000;
inline constexpr std::uint64_t kReferenceSeedTag = 0x2000;

}  // namespace mfchaos
