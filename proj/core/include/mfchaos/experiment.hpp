#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/entropy.hpp"
#include "mfchaos/rate_fit.hpp"

namespace mfchaos {

/// A sweep over particle counts, marginal sizes and times on one base config.
/// Every k must satisfy k <= min(n) and every t must be a grid time.
struct ExperimentPlan {
  SimConfig base;
  std::vector<std::size_t> n_values;
  std::vector<std::size_t> k_values;
  std::vector<double> t_values;
  /// Any of girsanov_full, knn, histogram_tv; girsanov_full also reports the
  /// subadditive surrogate.
  std::vector<EstimatorKind> estimators{EstimatorKind::girsanov_full, EstimatorKind::knn,
                                        EstimatorKind::histogram_tv};
  std::filesystem::path output_dir;
  double bound_c0 = 1.0;
  double bound_gamma = 1.0;
  double bound_m = 1.0;
  std::size_t knn_neighbors = 4;
  std::size_t tv_bins = 20;

  bool uses(EstimatorKind kind) const;
  bool empty() const noexcept { return n_values.empty() || k_values.empty() || t_values.empty(); }
  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// JSON layout: {"base": config, "sweep": {"n": [..], "k": [..], "t": [..]},
/// "estimators": [..], "bounds": {"C0", "gamma", "M"}, "knn_neighbors",
/// "tv_bins", "output"}. Only "base" is required; unknown keys are rejected.
ExperimentPlan parse_plan(std::string_view json_text);
ExperimentPlan load_plan(const std::filesystem::path& path);

struct EntropyRow {
  EntropyReport report;
  double eps = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
};

struct BoundRow {
  std::size_t n = 0;
  std::size_t k = 0;
  double t = 0.0;
  double closed_form = 0.0;
  double cascade = 0.0;
  double c = 0.0;
  double gamma = 0.0;
  double m = 0.0;
};

struct CheckRow {
  std::string check;  // martingale, pinsker, subadditivity
  std::size_t n = 0;
  std::size_t k = 0;
  double t = 0.0;
  double observed = 0.0;
  double allowed = 0.0;
  double margin = 0.0;  // >= 0 passes
  bool pass = false;
};

struct RateFitRow {
  std::string estimator;
  std::size_t fixed = 0;  // k for log_n fits, n for log_k fits
  double t = 0.0;
  RateFit fit;
};

struct SweepFailure {
  std::size_t n = 0;
  int exit_code = 0;
  std::string message;
};

struct ExperimentReport {
  std::vector<EntropyRow> entropy;
  std::vector<BoundRow> bounds;
  std::vector<CheckRow> checks;
  std::vector<RateFitRow> fits;
  std::vector<SweepFailure> failures;
  std::vector<std::string> notes;
  std::vector<double> picard_residuals;
  std::vector<double> picard_noise_floors;
  bool picard_converged = true;
  /// 0 success, 3 blow-up, 4 unreliable estimator, 5 failed check, 2 config;
  /// the smallest non-zero code encountered.
  int exit_code = 0;
};

/// Exit code for an exception: 2 config, 3 blow-up, 4 estimator, 1 otherwise.
int exit_code_for(std::exception_ptr error);

/// Runs every sweep point (one per n). A point that throws is recorded in
/// `failures` and the remaining points continue. Output depends only on the
/// plan, never on `threads`.
ExperimentReport run_experiment(const ExperimentPlan& plan, std::size_t threads = 0);

/// entropy.csv, bounds.csv, checks.csv, rate_fit.csv and manifest.json.
void write_report(const ExperimentPlan& plan, const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace mfchaos
