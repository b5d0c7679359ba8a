#include "mfchaos/vp_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "mfchaos/errors.hpp"
#include "mfchaos/torus.hpp"

namespace mfchaos {

double metric_distance(Metric metric, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = metric == Metric::torus ? wrap_coordinate(a[c] - b[c]) : a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

VpTree::VpTree(std::vector<double> points, std::size_t dim, Metric metric)
    : points_(std::move(points)), dim_(dim), count_(dim == 0 ? 0 : points_.size() / dim), metric_(metric) {
  if (dim == 0 || points_.size() % dim != 0) throw DomainError("VpTree: malformed point set");
  std::vector<std::size_t> items(count_);
  for (std::size_t i = 0; i < count_; ++i) items[i] = i;
  nodes_.reserve(count_);
  root_ = build(items, 0, count_);
}

// The first item of each range is the vantage point (deterministic); the
// rest is split at the median distance.
int VpTree::build(std::vector<std::size_t>& items, std::size_t lo, std::size_t hi) {
  if (lo >= hi) return -1;
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({items[lo], 0.0, -1, -1});
  if (hi - lo == 1) return index;
  const auto vp = row(items[lo]);
  const std::size_t mid = (lo + 1 + hi) / 2;
  auto by_distance = [&](std::size_t a, std::size_t b) {
    const double da = metric_distance(metric_, vp, row(a));
    const double db = metric_distance(metric_, vp, row(b));
    return da < db || (da == db && a < b);
  };
  std::nth_element(items.begin() + static_cast<std::ptrdiff_t>(lo + 1),
                   items.begin() + static_cast<std::ptrdiff_t>(mid),
                   items.begin() + static_cast<std::ptrdiff_t>(hi), by_distance);
  const double radius = metric_distance(metric_, vp, row(items[mid]));
  const int inside = build(items, lo + 1, mid);
  const int outside = build(items, mid, hi);
  nodes_[static_cast<std::size_t>(index)].radius = radius;
  nodes_[static_cast<std::size_t>(index)].inside = inside;
  nodes_[static_cast<std::size_t>(index)].outside = outside;
  return index;
}

std::vector<std::pair<double, std::size_t>> VpTree::nearest(std::span<const double> query, std::size_t k,
                                                            std::size_t exclude) const {
  if (query.size() != dim_) throw DomainError("VpTree: query dimension mismatch");
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;  // max-heap of the current k best
  double tau = std::numeric_limits<double>::infinity();
  // (node, lower bound on the distance to any point in its subtree)
  std::vector<std::pair<int, double>> stack;
  if (root_ >= 0 && k > 0) stack.emplace_back(root_, 0.0);
  while (!stack.empty()) {
    const auto [node_index, bound] = stack.back();
    stack.pop_back();
    if (bound > tau) continue;
    const Node& node = nodes_[static_cast<std::size_t>(node_index)];
    const double dist = metric_distance(metric_, query, row(node.point));
    if (node.point != exclude) {
      const Entry e{dist, node.point};
      if (heap.size() < k) {
        heap.push(e);
      } else if (e < heap.top()) {
        heap.pop();
        heap.push(e);
      }
      if (heap.size() == k) tau = heap.top().first;
    }
    // Inside holds distances <= radius, outside >= radius. The nearer side
    // is pushed last so it is searched first.
    const double inside_bound = std::max(0.0, dist - node.radius);
    const double outside_bound = std::max(0.0, node.radius - dist);
    if (dist < node.radius) {
      if (node.outside >= 0) stack.emplace_back(node.outside, outside_bound);
      if (node.inside >= 0) stack.emplace_back(node.inside, inside_bound);
    } else {
      if (node.inside >= 0) stack.emplace_back(node.inside, inside_bound);
      if (node.outside >= 0) stack.emplace_back(node.outside, outside_bound);
    }
  }
  std::vector<Entry> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace mfchaos
