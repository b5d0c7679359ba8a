#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/dynamics.hpp"
#include "mfchaos/girsanov.hpp"
#include "mfchaos/vp_tree.hpp"

namespace mfchaos {

enum class EstimatorKind {
  girsanov_full,         // H(P^(n,n)_t | mu_t^{(x)n}) from Girsanov weights
  girsanov_subadditive,  // (k/n) times the full value: an upper surrogate, not a k-marginal estimate
  knn,                   // k-nearest-neighbour KL divergence of sampled marginals
  histogram_tv,          // total variation of binned marginals
};

std::string to_string(EstimatorKind kind);

struct EntropyReport {
  EstimatorKind kind = EstimatorKind::knn;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t k = 1;
  std::size_t n = 1;
  double t = 0.0;
  /// Effective sample size (Girsanov) or sample count.
  double ess = 0.0;
  bool reliable = true;
  std::map<std::string, double> params;
  std::vector<std::string> notes;
};

/// Self-normalized importance estimate of E_Q[Z log Z] from log Z samples:
/// sum(Z log Z) / sum(Z) - log(mean Z), with a jackknife standard error.
/// `extra_variance` is added to the squared standard error. Unreliable when
/// the effective sample size (sum Z)^2 / sum Z^2 is below 5% of the samples.
/// Throws EstimatorError for fewer than 2 samples.
EntropyReport girsanov_entropy_from_log_weights(std::span<const double> log_z, std::size_t n, double t,
                                                double extra_variance = 0.0);

/// Full-system entropy at time t and its (k/n) subadditivity surrogate, in
/// that order. For fBm weights the gap to the 2 dt estimate is added to the
/// standard error as a discretization term.
std::vector<EntropyReport> entropy_girsanov(const GirsanovWeight& weights, std::size_t k, double t);

/// Wang-Kulkarni-Verdu nearest-neighbour estimate of KL(P | Q):
///   (dim / N) sum_i log(nu_k(i) / rho_k(i)) + log(M / (N - 1)).
/// Zero distances are floored at 1e-12 and counted in params["jittered"].
/// Needs at least 100 samples on each side.
EntropyReport entropy_knn(const SampleMatrix& p, const SampleMatrix& q, std::size_t neighbors = 4,
                          Metric metric = Metric::euclidean);

/// Half L1 distance between histograms with shared bins. `range` gives
/// [lo, hi) per axis; unset uses the pooled sample range, or [-1/2, 1/2) for
/// the torus. Samples outside the range fall in one shared overflow bin.
/// Refuses (EstimatorError) when the sample dimension exceeds 4.
EntropyReport tv_histogram(const SampleMatrix& p, const SampleMatrix& q, std::size_t bins_per_dim,
                           std::optional<std::pair<double, double>> range = std::nullopt,
                           bool torus = false);

/// Bins per axis capped so that every cell expects about 20 of `samples`
/// points: min(requested, max(2, floor((samples / 20)^(1 / dim)))).
std::size_t capped_tv_bins(std::size_t requested, std::size_t samples, std::size_t dim);

}  // namespace mfchaos
