#include "mfchaos/volterra.hpp"

#include <cmath>

#include "mfchaos/errors.hpp"

namespace mfchaos {

namespace {

double beta_function(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

}  // namespace

VolterraTransform::VolterraTransform(double hurst, TimeGrid grid)
    : hurst_(hurst), grid_(grid), mode_(Mode::exact_half) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Volterra transform: H must lie in (0, 1)");
  if (hurst == 0.5) return;
  mode_ = Mode::finite_difference_fractional;
  const double h = hurst;
  if (h > 0.5) {
    alpha_ = h - 0.5;
    const double c_h = std::sqrt(h * (2.0 * h - 1.0) / beta_function(2.0 - 2.0 * h, h - 0.5));
    d_h_ = c_h * std::tgamma(h - 0.5);
  } else {
    alpha_ = 0.5 - h;
    const double c_h =
        std::sqrt(2.0 * h / ((1.0 - 2.0 * h) * beta_function(1.0 - 2.0 * h, h + 0.5)));
    d_h_ = c_h * std::tgamma(h + 0.5);
  }
  // Coefficients of (1 - z)^q: q = a for D^a, q = -a for I^a.
  const double q = h > 0.5 ? alpha_ : -alpha_;
  weights_.resize(grid_.steps());
  weights_[0] = 1.0;
  for (std::size_t j = 1; j < weights_.size(); ++j) {
    weights_[j] = weights_[j - 1] * (1.0 - (q + 1.0) / static_cast<double>(j));
  }
}

std::vector<double> VolterraTransform::apply_to_rate(std::span<const double> u) const {
  const std::size_t n = grid_.steps();
  if (u.size() != n) throw DomainError("Volterra transform: rate length must equal steps");
  if (mode_ == Mode::exact_half) return {u.begin(), u.end()};

  const double dt = grid_.dt();
  const bool regular = hurst_ > 0.5;
  const double a = alpha_;
  std::vector<double> f(n);
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = (static_cast<double>(k) + 0.5) * dt;
    f[k] = (regular ? std::pow(s[k], -a) : std::pow(s[k], a)) * u[k];
  }
  const double step_power = regular ? std::pow(dt, -a) : std::pow(dt, a);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) acc += weights_[j] * f[k - j];
    const double outer = regular ? std::pow(s[k], a) : std::pow(s[k], -a);
    out[k] = outer * step_power * acc / d_h_;
  }
  return out;
}

std::vector<double> VolterraTransform::apply(std::span<const double> h) const {
  if (h.size() != grid_.points()) throw DomainError("Volterra transform: path length must equal points");
  if (h[0] != 0.0) throw DomainError("Volterra transform: path must start at 0");
  std::vector<double> u(grid_.steps());
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = (h[k + 1] - h[k]) / grid_.dt();
  return apply_to_rate(u);
}

double VolterraTransform::unit_rate_exact(double s) const {
  if (mode_ == Mode::exact_half) return 1.0;
  return std::tgamma(1.5 - hurst_) / (std::tgamma(2.0 - 2.0 * hurst_) * d_h_) *
         std::pow(s, 0.5 - hurst_);
}

std::vector<double> volterra_inverse_apply(std::span<const double> h, double hurst,
                                           const TimeGrid& grid) {
  return VolterraTransform(hurst, grid).apply(h);
}

}  // namespace mfchaos
