#pragma once

#include <cstddef>

namespace mfchaos {

/// Uniform grid t0, t0 + dt, ..., t0 + steps * dt.
class TimeGrid {
 public:
  TimeGrid(double t0, double dt, std::size_t steps);

  /// Grid whose terminal time equals `horizon` within 1e-12 relative error;
  /// throws ConfigError when dt does not divide horizon - t0.
  static TimeGrid from_horizon(double t0, double horizon, double dt);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t points() const noexcept { return steps_ + 1; }
  double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }
  double horizon() const noexcept { return time(steps_); }

  struct Snap {
    std::size_t step;
    bool exact;  // false when t was off-grid and snapped to the nearest point
  };
  /// Nearest grid index for time t, clamped to [0, steps].
  Snap nearest(double t) const noexcept;

  /// The grid with every second point (requires an even step count).
  TimeGrid coarsened() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t0_;
  double dt_;
  std::size_t steps_;
};

}  // namespace mfchaos
