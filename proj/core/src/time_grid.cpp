#include "mfchaos/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfchaos/errors.hpp"

namespace mfchaos {

TimeGrid::TimeGrid(double t0, double dt, std::size_t steps) : t0_(t0), dt_(dt), steps_(steps) {
  if (!(t0 >= 0.0) || !std::isfinite(t0)) throw ConfigError("time grid: t0 must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time grid: dt must be finite and > 0");
  if (steps < 1) throw ConfigError("time grid: steps must be >= 1");
}

TimeGrid TimeGrid::from_horizon(double t0, double horizon, double dt) {
  if (!(horizon > t0)) throw ConfigError("time grid: horizon must exceed t0");
  if (!(dt > 0.0)) throw ConfigError("time grid: dt must be > 0");
  const double ratio = (horizon - t0) / dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  TimeGrid grid(t0, dt, std::max<std::size_t>(steps, 1));
  const double rel = std::abs(grid.horizon() - horizon) / std::max(1.0, std::abs(horizon));
  if (rel > 1e-12) {
    throw ConfigError("time grid: dt = " + std::to_string(dt) + " does not divide [" +
                      std::to_string(t0) + ", " + std::to_string(horizon) + "]");
  }
  return grid;
}

TimeGrid::Snap TimeGrid::nearest(double t) const noexcept {
  const double pos = (t - t0_) / dt_;
  const double clamped = std::clamp(pos, 0.0, static_cast<double>(steps_));
  const auto k = static_cast<std::size_t>(std::llround(clamped));
  const bool exact = std::abs(pos - static_cast<double>(k)) <= 1e-9;
  return {k, exact};
}

TimeGrid TimeGrid::coarsened() const {
  if (steps_ % 2 != 0 || steps_ < 2) throw ConfigError("time grid: coarsening needs an even step count");
  return TimeGrid(t0_, 2.0 * dt_, steps_ / 2);
}

}  // namespace mfchaos
