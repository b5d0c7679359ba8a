#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mfchaos/path.hpp"
#include "mfchaos/rng.hpp"
#include "mfchaos/time_grid.hpp"

namespace mfchaos {

/// R_H(t, s) = (|t|^{2H} + |s|^{2H} - |t - s|^{2H}) / 2. Throws DomainError
/// for H outside (0, 1) or negative times.
double fbm_covariance(double t, double s, double hurst);

/// Autocovariance of unit-step fractional Gaussian noise at integer lag k:
/// (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
double fgn_autocovariance(std::size_t lag, double hurst);

/// Exact sampler of fGn increments on a uniform grid.
///
/// The primary route is circulant embedding of size 2N; when the embedding
/// has a negative eigenvalue below -1e-12 of the largest one, a dense
/// Cholesky factor of the N x N Toeplitz covariance is used instead and
/// used_fallback() reports it. Sampling is const and thread safe.
class FbmGenerator {
 public:
  enum class Method { automatic, circulant, cholesky };

  FbmGenerator(std::size_t steps, double dt, double hurst, Method method = Method::automatic);
  ~FbmGenerator();
  FbmGenerator(FbmGenerator&&) noexcept;
  FbmGenerator& operator=(FbmGenerator&&) noexcept;

  std::size_t steps() const noexcept { return steps_; }
  double hurst() const noexcept { return hurst_; }
  bool used_fallback() const noexcept { return fallback_; }
  Method method() const noexcept { return method_; }

  /// Writes `steps` increments of one coordinate into `out`.
  void increments(RngStream& rng, std::span<double> out) const;

 private:
  struct Impl;
  std::size_t steps_;
  double dt_;
  double hurst_;
  Method method_;
  bool fallback_ = false;
  std::unique_ptr<Impl> impl_;
};

/// A discretized driver: values has grid.points() * dim entries with
/// values[0..dim) = 0. underlying_w is set only for drivers synthesized from
/// an explicit Brownian path.
struct NoisePath {
  TimeGrid grid{0.0, 1.0, 1};
  std::size_t dim = 1;
  double hurst = 0.5;
  std::vector<double> values;
  bool used_fallback = false;
  std::optional<Path> underlying_w;

  Path as_path() const { return {dim, values}; }
};

/// Brownian path with independent N(0, dt I) increments.
NoisePath sample_brownian(const TimeGrid& grid, std::size_t dim, RngStream& rng);

/// fBm path with Hurst index H; coordinates are independent and drawn in
/// order from `rng`. Builds a generator per call; reuse FbmGenerator for
/// ensembles.
NoisePath sample_fbm(const TimeGrid& grid, double hurst, std::size_t dim, RngStream& rng);

/// Empirical E[B_t B_s] against R_H(t, s) on the grid t_i = i T / points.
struct CovarianceCell {
  double t = 0.0;
  double s = 0.0;
  double empirical = 0.0;
  double exact = 0.0;
  double std_error = 0.0;  // of the empirical mean of B_t B_s
};

struct CovarianceCheck {
  double hurst = 0.5;
  std::size_t paths = 0;
  std::vector<CovarianceCell> cells;  // row-major over (t, s), points x points
  double max_abs_z = 0.0;
  bool pass = false;  // every |empirical - exact| <= sigmas * std_error
  bool used_fallback = false;
};

/// Path p draws from RngStream(seed, p, 0, kStreamNoise). Partial sums are
/// combined in a fixed order, so the result does not depend on `threads`.
CovarianceCheck fbm_covariance_check(std::size_t points, double horizon, double hurst, std::size_t paths,
                                     std::uint64_t seed, double sigmas = 4.0, std::size_t threads = 0,
                                     FbmGenerator::Method method = FbmGenerator::Method::automatic);

}  // namespace mfchaos
