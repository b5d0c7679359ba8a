#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mfchaos {

/// Bound values over (t, k), laid out [time][k - 1] for k = 1..n.
struct BoundEnvelope {
  enum class Provenance { closed_form, ode_cascade };

  double c0 = 0.0;
  double gamma = 0.0;
  double m = 0.0;
  double horizon = 0.0;
  std::size_t n = 0;
  Provenance provenance = Provenance::closed_form;
  std::vector<double> times;
  std::vector<double> values;

  double at(std::size_t time_index, std::size_t k) const { return values[time_index * n + (k - 1)]; }
};

std::string to_string(BoundEnvelope::Provenance p);

/// 8 (C0 + (1 + gamma) M T) e^{6 gamma T}.
double constant_C(double c0, double gamma, double m, double horizon);

/// 2 C k^2 / n^2 + C exp(-2 n (e^{-gamma T} - k/n)_+^2). Evaluated for any
/// 1 <= k <= n; see theorem_bound_applies for the n >= 6 e^{gamma T} regime.
double theorem_bound(double c, double gamma, double horizon, std::size_t n, std::size_t k);
bool theorem_bound_applies(double gamma, double horizon, std::size_t n);

/// theorem_bound with C = constant_C at every listed time, T = that time.
BoundEnvelope closed_form_envelope(double c0, double gamma, double m, std::size_t n,
                                   const std::vector<double>& times);

/// Explicit Euler for the worst case of the hierarchy
///   dH^k/dt = k (k-1)^2 / (n-1)^2 M + gamma k (H^{k+1} - H^k),  k < n,
///   H^n_t = H^n_0 + n M t / 2.
/// Requires gamma dt <= 1 / (2 n) (throws EstimatorError naming the largest
/// admissible dt otherwise). The step is shrunk to divide T. Records every
/// `record_every`-th step and the terminal one.
BoundEnvelope hierarchy_ode_solve(std::size_t n, double m, double gamma, std::span<const double> h0,
                                  double horizon, double dt, std::size_t record_every = 1);

/// Chaotic initial data H^k_0 = C0 k^2 / n^2.
std::vector<double> chaotic_initial_entropy(double c0, std::size_t n);

struct HorizonEstimate {
  enum class Regime { brownian, fractional };
  Regime regime = Regime::brownian;
  double kappa = 0.0;
  double beta = 0.0;
  double hurst = 0.5;
  double c = 0.0;  // fractional constant
  double delta_star = 0.0;
};

/// Brownian: 1 / (16 max(kappa^2, 1) beta).
HorizonEstimate short_time_horizon_brownian(double kappa, double beta);

/// H in (1/2, 1): (C kappa^2 beta)^{-1/(2 - 2H)}; H <= 1/2 falls back to the
/// Brownian form. Throws DomainError for non-positive inputs.
HorizonEstimate short_time_horizon_fractional(double kappa, double beta, double hurst, double c);

/// Largest admissible beta in E[(int_0^delta |Delta b|^2)^p] <= p! beta^p delta^{e p} / n^p
/// over p = 1, 2, 3, with e = 2 - 2H (1 for Brownian noise).
struct BetaFit {
  double beta = 0.0;
  std::vector<double> per_order;  // beta_p for p = 1, 2, 3
  double residual = 0.0;          // (max - min) / max over p
};

BetaFit estimate_beta(std::span<const double> energies, std::size_t n, double delta, double hurst = 0.5);

}  // namespace mfchaos
