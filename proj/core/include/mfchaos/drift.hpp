#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mfchaos/config.hpp"
#include "mfchaos/kernels.hpp"
#include "mfchaos/path.hpp"
#include "mfchaos/time_grid.hpp"

namespace mfchaos {

/// States of n particles stored point-major: point s holds n * dim doubles.
/// `step` is the index of the current point within the stored block and
/// `grid_step` its index on the time grid. A rolling buffer that keeps only
/// the current point has step == 0.
struct Population {
  const double* states = nullptr;
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t step = 0;
  std::size_t grid_step = 0;
  double time = 0.0;

  PathView particle(std::size_t i) const noexcept {
    return {states + i * dim, n * dim, dim, step, time};
  }
  std::span<const double> current(std::size_t i) const noexcept {
    return {states + step * n * dim + i * dim, dim};
  }
};

/// Reference-law average <mu_t, b(t, x, .)> for one frozen law.
class LawAverager {
 public:
  virtual ~LawAverager() = default;
  virtual void average(std::size_t grid_step, const PathView& x, std::span<double> out) const = 0;
};

/// The self drift b0(t, x).
class B0Term {
 public:
  virtual ~B0Term() = default;
  virtual std::string name() const = 0;
  virtual void evaluate(const PathView& x, std::span<double> out) const = 0;
  virtual bool state_dependent() const { return true; }
};

/// The pairwise drift b(t, x, y).
class InteractionTerm {
 public:
  virtual ~InteractionTerm() = default;
  virtual std::string name() const = 0;
  virtual void evaluate(const PathView& x, const PathView& y, std::span<double> out) const = 0;
  virtual bool state_dependent() const { return true; }

  /// out[i] = (n-1)^{-1} sum_{j != i} b(t, X^i, X^j) for every particle,
  /// written to out[i * dim .. (i + 1) * dim). The default is the O(n^2)
  /// loop in ascending j.
  virtual void population_average(const Population& pop, std::span<double> out) const;

  /// Averager against `law`, whose samples are the particles of the
  /// full-history population (all grid points stored). Terms without a
  /// closed form average over the first `cap` samples.
  virtual std::unique_ptr<LawAverager> averager(const double* law_states, std::size_t samples,
                                                std::size_t dim, const TimeGrid& grid,
                                                std::size_t cap) const;
};

/// Drift b0 + b with the linear-growth constant K of
/// |b0(t,x)| + |b(t,x,y)| <= K (1 + |x|_t + |y|_t).
struct DriftSpec {
  std::shared_ptr<const B0Term> b0;
  std::shared_ptr<const InteractionTerm> interaction;
  double growth_constant = 0.0;  // +inf when no linear bound holds
  bool state_dependent = true;
};

/// Kernel interaction b(t, x, y) = K(x_t - y_t), minimal image on the torus.
std::shared_ptr<const InteractionTerm> make_kernel_interaction(KernelSpec kernel, bool torus);

std::shared_ptr<const B0Term> make_b0(const TermSpec& spec, std::size_t dim);
std::shared_ptr<const InteractionTerm> make_interaction(const SimConfig& config);

/// Drift of a validated configuration.
DriftSpec make_drift(const SimConfig& config);

struct GrowthReport {
  double max_ratio = 0.0;
  bool pass = true;
};

/// max over ordered pairs of paths and the given times of
/// (|b0(t,x)| + |b(t,x,y)|) / (1 + |x|_t + |y|_t); pass when the maximum does
/// not exceed growth_constant + 1e-9. Times snap to the nearest grid point.
GrowthReport validate_linear_growth(const DriftSpec& drift, const std::vector<Path>& paths,
                                    const TimeGrid& grid, const std::vector<double>& times);

}  // namespace mfchaos
