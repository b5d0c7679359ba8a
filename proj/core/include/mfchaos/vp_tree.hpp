#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mfchaos {

/// Metric used by VpTree: Euclidean, or minimal-image distance on the torus.
enum class Metric { euclidean, torus };

double metric_distance(Metric metric, std::span<const double> a, std::span<const double> b);

/// Vantage-point tree over the rows of a point set. Works for any metric, in
/// particular the wrapped torus distance. Immutable after construction, so
/// concurrent queries are safe.
class VpTree {
 public:
  /// `points` holds count * dim coordinates; the tree keeps a copy.
  VpTree(std::vector<double> points, std::size_t dim, Metric metric);

  std::size_t size() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }

  /// The k nearest points to `query` as (distance, index), ascending by
  /// distance, ties broken by index. Point `exclude` (if < size) is skipped.
  std::vector<std::pair<double, std::size_t>> nearest(std::span<const double> query, std::size_t k,
                                                      std::size_t exclude = static_cast<std::size_t>(-1)) const;

 private:
  struct Node {
    std::size_t point;
    double radius;
    int inside;   // child index or -1
    int outside;  // child index or -1
  };

  int build(std::vector<std::size_t>& items, std::size_t lo, std::size_t hi);
  std::span<const double> row(std::size_t i) const noexcept { return {points_.data() + i * dim_, dim_}; }

  std::vector<double> points_;
  std::size_t dim_;
  std::size_t count_;
  Metric metric_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace mfchaos
