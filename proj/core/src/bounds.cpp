#include "mfchaos/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfchaos/errors.hpp"

namespace mfchaos {

std::string to_string(BoundEnvelope::Provenance p) {
  return p == BoundEnvelope::Provenance::closed_form ? "closed_form" : "ode_cascade";
}

double constant_C(double c0, double gamma, double m, double horizon) {
  return 8.0 * (c0 + (1.0 + gamma) * m * horizon) * std::exp(6.0 * gamma * horizon);
}

double theorem_bound(double c, double gamma, double horizon, std::size_t n, std::size_t k) {
  if (n == 0 || k < 1 || k > n) throw DomainError("theorem_bound: need 1 <= k <= n");
  const double ratio = static_cast<double>(k) / static_cast<double>(n);
  const double gap = std::max(0.0, std::exp(-gamma * horizon) - ratio);
  return 2.0 * c * ratio * ratio + c * std::exp(-2.0 * static_cast<double>(n) * gap * gap);
}

bool theorem_bound_applies(double gamma, double horizon, std::size_t n) {
  return static_cast<double>(n) >= 6.0 * std::exp(gamma * horizon);
}

BoundEnvelope closed_form_envelope(double c0, double gamma, double m, std::size_t n,
                                   const std::vector<double>& times) {
  BoundEnvelope env;
  env.c0 = c0;
  env.gamma = gamma;
  env.m = m;
  env.n = n;
  env.horizon = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  env.provenance = BoundEnvelope::Provenance::closed_form;
  env.times = times;
  env.values.reserve(times.size() * n);
  for (double t : times) {
    const double c = constant_C(c0, gamma, m, t);
    for (std::size_t k = 1; k <= n; ++k) env.values.push_back(theorem_bound(c, gamma, t, n, k));
  }
  return env;
}

std::vector<double> chaotic_initial_entropy(double c0, std::size_t n) {
  std::vector<double> h0(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double r = static_cast<double>(k) / static_cast<double>(n);
    h0[k - 1] = c0 * r * r;
  }
  return h0;
}

BoundEnvelope hierarchy_ode_solve(std::size_t n, double m, double gamma, std::span<const double> h0,
                                  double horizon, double dt, std::size_t record_every) {
  if (n < 2) throw DomainError("hierarchy_ode_solve: n must be >= 2");
  if (h0.size() != n) throw DomainError("hierarchy_ode_solve: H0 must have length n");
  for (double v : h0) {
    if (!(v >= 0.0)) throw DomainError("hierarchy_ode_solve: H0 must be nonnegative");
  }
  if (!(m >= 0.0) || !(gamma >= 0.0) || !(horizon >= 0.0) || !(dt > 0.0)) {
    throw DomainError("hierarchy_ode_solve: M, gamma, T must be >= 0 and dt > 0");
  }
  if (record_every == 0) throw DomainError("hierarchy_ode_solve: record_every must be >= 1");
  const double limit = gamma > 0.0 ? 1.0 / (2.0 * gamma * static_cast<double>(n)) : dt;
  if (dt > limit * (1.0 + 1e-12)) {
    throw EstimatorError("hierarchy_ode_solve: explicit Euler needs dt <= " + std::to_string(limit));
  }
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / dt - 1e-9)));
  const double h = horizon / static_cast<double>(steps);
  const double nm1sq = static_cast<double>(n - 1) * static_cast<double>(n - 1);

  BoundEnvelope env;
  env.gamma = gamma;
  env.m = m;
  env.n = n;
  env.horizon = horizon;
  env.c0 = h0.back();
  env.provenance = BoundEnvelope::Provenance::ode_cascade;
  std::vector<double> cur(h0.begin(), h0.end()), next(n);
  auto record = [&](std::size_t s) {
    env.times.push_back(static_cast<double>(s) * h);
    env.values.insert(env.values.end(), cur.begin(), cur.end());
  };
  record(0);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t k = 1; k < n; ++k) {
      const double kd = static_cast<double>(k);
      const double source = kd * (kd - 1.0) * (kd - 1.0) / nm1sq * m;
      next[k - 1] = cur[k - 1] + h * (source + gamma * kd * (cur[k] - cur[k - 1]));
    }
    next[n - 1] = h0[n - 1] + 0.5 * static_cast<double>(n) * m * static_cast<double>(s + 1) * h;
    cur.swap(next);
    if ((s + 1) % record_every == 0 || s + 1 == steps) record(s + 1);
  }
  return env;
}

HorizonEstimate short_time_horizon_brownian(double kappa, double beta) {
  if (!(kappa > 0.0) || !(beta > 0.0)) throw DomainError("short_time_horizon: kappa, beta must be > 0");
  HorizonEstimate est;
  est.regime = HorizonEstimate::Regime::brownian;
  est.kappa = kappa;
  est.beta = beta;
  est.delta_star = 1.0 / (16.0 * std::max(kappa * kappa, 1.0) * beta);
  return est;
}

HorizonEstimate short_time_horizon_fractional(double kappa, double beta, double hurst, double c) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("short_time_horizon: H must lie in (0, 1)");
  if (hurst <= 0.5) {
    HorizonEstimate est = short_time_horizon_brownian(kappa, beta);
    est.hurst = hurst;
    return est;
  }
  if (!(kappa > 0.0) || !(beta > 0.0) || !(c > 0.0)) {
    throw DomainError("short_time_horizon: kappa, beta, C must be > 0");
  }
  HorizonEstimate est;
  est.regime = HorizonEstimate::Regime::fractional;
  est.kappa = kappa;
  est.beta = beta;
  est.hurst = hurst;
  est.c = c;
  est.delta_star = std::pow(c * kappa * kappa * beta, -1.0 / (2.0 - 2.0 * hurst));
  return est;
}

BetaFit estimate_beta(std::span<const double> energies, std::size_t n, double delta, double hurst) {
  if (energies.empty()) throw EstimatorError("estimate_beta: no samples");
  if (!(delta > 0.0) || n == 0) throw DomainError("estimate_beta: delta and n must be positive");
  const double e = hurst > 0.5 ? 2.0 - 2.0 * hurst : 1.0;
  BetaFit fit;
  for (int p = 1; p <= 3; ++p) {
    double moment = 0.0;
    for (double v : energies) moment += std::pow(v, p);
    moment /= static_cast<double>(energies.size());
    const double beta = static_cast<double>(n) / std::pow(delta, e) *
                        std::pow(moment / std::tgamma(p + 1.0), 1.0 / p);
    fit.per_order.push_back(beta);
  }
  const auto [lo, hi] = std::minmax_element(fit.per_order.begin(), fit.per_order.end());
  fit.beta = *hi;
  fit.residual = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  return fit;
}

}  // namespace mfchaos
