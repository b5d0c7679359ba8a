#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace mfchaos {

/// Stream purposes. Per-coordinate purposes are offset by the coordinate
/// index.
enum StreamPurpose : std::uint64_t {
  kStreamInitial = 0,
  kStreamNoise = 16,       // + coordinate
  kStreamGirsanovW = 48,   // + coordinate
  kStreamMisc = 96,
};

/// Random stream keyed by (seed, replica, particle, stream).
///
/// The key is hashed with SplitMix64 into the state of a xoshiro256**
/// generator, so a stream depends only on its key: the same key reproduces
/// the same sequence on any thread, and distinct keys give independent
/// sequences. A stream is owned by exactly one worker at a time.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t replica, std::uint64_t particle,
            std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal variate.
  double normal() { return normal_(*this); }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; also used to derive sub-seeds for experiment stages.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a stage seed from a root seed and a tag (e.g. Picard iteration).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) noexcept;

}  // namespace mfchaos
