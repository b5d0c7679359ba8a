#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfchaos/time_grid.hpp"

namespace mfchaos {

/// Discretized inverse Volterra operator K_H^{-1} of the fBm representation
/// B^H = int K_H(t, s) dW_s, acting on h = int_0^. u for u constant on each
/// grid interval. Outputs are per interval, sampled at the midpoints
/// s_k = (k + 1/2) dt measured from the start of the grid.
///
/// H = 1/2: differentiation, exact.
/// H > 1/2: d_H^{-1} s^a D^a [r^{-a} u],          a = H - 1/2.
/// H < 1/2: d_H^{-1} s^{-a} I^a [r^a u],           a = 1/2 - H.
/// D^a and I^a use Grunwald-Letnikov weights on the midpoint samples and are
/// first order in dt away from s = 0.
class VolterraTransform {
 public:
  enum class Mode { exact_half, finite_difference_fractional };

  VolterraTransform(double hurst, TimeGrid grid);

  double hurst() const noexcept { return hurst_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  Mode mode() const noexcept { return mode_; }

  /// d_H (1 at H = 1/2).
  double normalization() const noexcept { return d_h_; }

  /// Transform of the rate u: steps values in, steps values out.
  std::vector<double> apply_to_rate(std::span<const double> u) const;

  /// Transform of a path h (steps + 1 samples, h[0] = 0): u is recovered by
  /// forward differences, then apply_to_rate.
  std::vector<double> apply(std::span<const double> h) const;

  /// Closed-form transform of u = 1 at time s:
  /// Gamma(3/2 - H) / (Gamma(2 - 2H) d_H) s^{1/2 - H}.
  double unit_rate_exact(double s) const;

 private:
  double hurst_;
  TimeGrid grid_;
  Mode mode_;
  double alpha_ = 0.0;
  double d_h_ = 1.0;
  std::vector<double> weights_;  // Grunwald-Letnikov weights, length steps
};

/// Functional form of VolterraTransform::apply.
std::vector<double> volterra_inverse_apply(std::span<const double> h, double hurst,
                                           const TimeGrid& grid);

}  // namespace mfchaos
