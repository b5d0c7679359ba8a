#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfchaos {

/// Read-only view of one trajectory restricted to [t0, t]: points 0..step,
/// each of `dim` coordinates, consecutive points `stride` doubles apart.
/// Access beyond `step` throws, which makes every path functional built on
/// a PathView non-anticipative.
class PathView {
 public:
  PathView(const double* base, std::size_t stride, std::size_t dim, std::size_t step,
           double time) noexcept
      : base_(base), stride_(stride), dim_(dim), step_(step), time_(time) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

  std::span<const double> at(std::size_t s) const;
  std::span<const double> current() const noexcept { return {base_ + step_ * stride_, dim_}; }

  /// Running supremum of the Euclidean norm over points 0..step.
  double sup_norm() const noexcept;

 private:
  const double* base_;
  std::size_t stride_;
  std::size_t dim_;
  std::size_t step_;
  double time_;
};

/// A single trajectory on a time grid, stored point-major.
struct Path {
  std::size_t dim = 1;
  std::vector<double> values;  // points * dim

  std::size_t points() const noexcept { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> at(std::size_t s) const noexcept { return {values.data() + s * dim, dim}; }
  PathView view(std::size_t step, double time) const noexcept {
    return {values.data(), dim, dim, step, time};
  }
};

}  // namespace mfchaos
