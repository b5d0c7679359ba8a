#pragma once

// Shared pieces of the Euler-Maruyama integrators: keyed initial draws and
// keyed driver increments.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/noise.hpp"
#include "mfchaos/rng.hpp"

namespace mfchaos::detail {

/// Initial position of (replica, particle) drawn from the configured law.
void draw_initial(const SimConfig& config, std::uint64_t seed, std::size_t replica,
                  std::size_t particle, std::span<double> x0);

/// Generator shared by all fractional drivers of one configuration; null for
/// Brownian noise.
std::shared_ptr<const FbmGenerator> make_fbm_generator(const SimConfig& config);

/// Driver increments dB for particles [first, first + count) of one replica,
/// stream (seed, replica, particle, base_stream + coordinate). Brownian
/// increments are drawn step by step; fBm increments are synthesized up front.
class IncrementSource {
 public:
  IncrementSource(const SimConfig& config, const FbmGenerator* fbm, std::uint64_t seed,
                  std::size_t replica, std::size_t first, std::size_t count,
                  std::uint64_t base_stream = kStreamNoise, bool force_brownian = false);

  /// Increments of step k for all particles, laid out particle-major
  /// (count * dim). Steps must be requested in order.
  void next(std::size_t k, std::span<double> out);

 private:
  std::size_t dim_;
  std::size_t count_;
  double sqrt_dt_;
  bool brownian_;
  std::size_t steps_;
  std::vector<RngStream> streams_;
  std::vector<double> increments_;  // fBm: [particle][coordinate][step]
};

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!(x - x == 0.0)) return false;
  }
  return true;
}

}  // namespace mfchaos::detail
