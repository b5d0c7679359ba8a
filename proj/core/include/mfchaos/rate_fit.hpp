#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mfchaos {

enum class RateAxis {
  n_at_fixed_k,  // log H against log n
  k_at_fixed_n,  // log H against log k
};

std::string to_string(RateAxis axis);

struct RateFit {
  RateAxis axis = RateAxis::n_at_fixed_k;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  /// log H - (intercept + slope log x), one per used point.
  std::vector<double> residuals;
  std::size_t used = 0;
  std::size_t excluded = 0;  // points with H <= 0 or x <= 0
  /// Set when log H has no variance (R^2 is then reported as 0).
  bool flagged = false;
};

/// Ordinary least squares on (log x, log H). Points with H <= 0 are excluded
/// and counted. Throws EstimatorError with fewer than 3 usable points.
RateFit fit_rate(std::span<const std::pair<double, double>> points, RateAxis axis = RateAxis::n_at_fixed_k);

}  // namespace mfchaos
