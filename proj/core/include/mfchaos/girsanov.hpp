#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/dynamics.hpp"
#include "mfchaos/mean_field.hpp"

namespace mfchaos {

/// Log-density log Z_t = log dP/dQ of the interacting n-particle path law P
/// against n independent limit copies Q, one value per replica and recorded
/// step, laid out [replica][record].
///
/// With Delta b^i_t = (n-1)^{-1} sum_{j != i} b(t, X^i, X^j) - <mu_t, b(t, X^i, .)>
/// evaluated on the copies and u = Delta b / scale,
///   Brownian: log Z_t = sum_i sum_{t_k < t} u^i_k . dW^i_k - |u^i_k|^2 dt / 2,
///   fBm:      the same with u replaced by Delta K = K_H^{-1}(int u) and W an
///             explicitly simulated Brownian path independent of B^H.
/// Left-point sums make E[Z_t] = 1 exact in discrete time.
struct GirsanovWeight {
  std::size_t replicas = 0;
  std::size_t n = 0;
  TimeGrid grid{0.0, 1.0, 1};
  std::vector<std::size_t> recorded_steps;
  std::vector<double> log_z;
  /// fBm only: the same exponent computed on the 2 dt grid (NaN at odd steps).
  std::vector<double> log_z_coarse;
  /// int_0^t |Delta b^1_s|^2 ds per replica and recorded step.
  std::vector<double> energy;
  /// False when the exponent carries Volterra discretization error (H != 1/2).
  bool exact = true;
  double hurst = 0.5;
  double eps = 0.0;
  /// The reference copies, when requested.
  std::optional<ParticleEnsemble> copies;

  double log_weight(std::size_t replica, std::size_t record) const {
    return log_z[replica * recorded_steps.size() + record];
  }
  std::optional<std::size_t> record_index(std::size_t step) const;
  /// Nearest recorded index to time t.
  std::size_t nearest_record(double t) const;
};

struct GirsanovOptions {
  std::size_t replicas = 0;  // 0: config.replicas
  std::size_t n = 0;         // 0: config.n_particles
  std::size_t threads = 0;
  std::vector<std::size_t> record_steps;  // empty: every step
  bool keep_copies = false;
};

/// Simulates the reference copies (same streams as sample_reference_copies)
/// and accumulates the weight. Throws ConfigError for zero noise scale.
GirsanovWeight girsanov_weight(const SimConfig& config, const MeanFieldLaw& law,
                               const GirsanovOptions& options = {});

/// sum_k u_k . dW_k - |u_k|^2 dt / 2 for per-step rates u and increments dW
/// (steps * dim each, step-major).
double accumulate_log_weight(std::span<const double> u, std::span<const double> dW, double dt);

/// Sample mean of Z_t with its standard error.
struct MartingaleCheck {
  double mean = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  bool pass = false;  // |mean - 1| <= 3 std_error
};

MartingaleCheck check_martingale(std::span<const double> log_z);
MartingaleCheck check_martingale(const GirsanovWeight& weights, double t);

/// Terminal-time log weights of one record.
std::vector<double> log_weights_at(const GirsanovWeight& weights, std::size_t record);
std::vector<double> coarse_log_weights_at(const GirsanovWeight& weights, std::size_t record);

}  // namespace mfchaos
