#include "mfchaos/rate_fit.hpp"

#include <algorithm>
#include <cmath>

#include "mfchaos/errors.hpp"

namespace mfchaos {

std::string to_string(RateAxis axis) {
  return axis == RateAxis::n_at_fixed_k ? "log_n" : "log_k";
}

RateFit fit_rate(std::span<const std::pair<double, double>> points, RateAxis axis) {
  RateFit fit;
  fit.axis = axis;
  std::vector<double> xs, ys;
  for (const auto& [x, h] : points) {
    if (!(h > 0.0) || !(x > 0.0) || !std::isfinite(h) || !std::isfinite(x)) {
      ++fit.excluded;
      continue;
    }
    xs.push_back(std::log(x));
    ys.push_back(std::log(h));
  }
  fit.used = xs.size();
  if (fit.used < 3) {
    throw EstimatorError("fit_rate: needs at least 3 points with H > 0 (" + std::to_string(fit.excluded) +
                         " excluded)");
  }
  const double m = static_cast<double>(fit.used);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < fit.used; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < fit.used; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw EstimatorError("fit_rate: all abscissae coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < fit.used; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    fit.residuals.push_back(r);
    sse += r * r;
  }
  const double scale = std::max(1.0, std::abs(my));
  if (syy <= 1e-24 * scale * scale * m) {
    fit.flagged = true;
    fit.slope = 0.0;
    fit.intercept = my;
    fit.r2 = 0.0;
  } else {
    fit.r2 = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  }
  return fit;
}

}  // namespace mfchaos
