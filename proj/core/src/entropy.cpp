#include "mfchaos/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfchaos/errors.hpp"

namespace mfchaos {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::girsanov_full:
      return "girsanov_full";
    case EstimatorKind::girsanov_subadditive:
      return "girsanov_subadditive";
    case EstimatorKind::knn:
      return "knn";
    case EstimatorKind::histogram_tv:
      return "histogram_tv";
  }
  return "unknown";
}

EntropyReport girsanov_entropy_from_log_weights(std::span<const double> log_z, std::size_t n, double t,
                                                double extra_variance) {
  const std::size_t count = log_z.size();
  if (count < 2) throw EstimatorError("Girsanov entropy needs at least 2 replicas");
  double lmax = -std::numeric_limits<double>::infinity();
  for (double l : log_z) {
    if (!std::isfinite(l)) throw EstimatorError("Girsanov entropy: non-finite log weight");
    lmax = std::max(lmax, l);
  }
  std::vector<double> w(count);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    w[r] = std::exp(log_z[r] - lmax);
    s0 += w[r];
    s1 += w[r] * log_z[r];
    s2 += w[r] * w[r];
  }
  const double m = static_cast<double>(count);
  const double value = s1 / s0 - lmax - std::log(s0 / m);

  std::vector<double> loo(count);
  double loo_mean = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    const double a0 = s0 - w[r];
    const double a1 = s1 - w[r] * log_z[r];
    loo[r] = a0 > 0.0 ? a1 / a0 - lmax - std::log(a0 / (m - 1.0)) : value;
    loo_mean += loo[r];
  }
  loo_mean /= m;
  double jk = 0.0;
  for (double v : loo) jk += (v - loo_mean) * (v - loo_mean);
  jk *= (m - 1.0) / m;

  EntropyReport rep;
  rep.kind = EstimatorKind::girsanov_full;
  rep.value = value;
  rep.std_error = std::sqrt(jk + extra_variance);
  rep.k = n;
  rep.n = n;
  rep.t = t;
  rep.ess = s0 * s0 / s2;
  rep.reliable = rep.ess >= 0.05 * m;
  rep.params["replicas"] = m;
  rep.params["mean_z"] = std::exp(lmax) * s0 / m;
  if (!rep.reliable) rep.notes.emplace_back("effective sample size below 5% of replicas");
  return rep;
}

std::vector<EntropyReport> entropy_girsanov(const GirsanovWeight& weights, std::size_t k, double t) {
  if (k < 1 || k > weights.n) throw DomainError("entropy_girsanov: k must lie in [1, n]");
  if (weights.replicas < 1000) throw EstimatorError("entropy_girsanov: needs at least 1000 replicas");
  const std::size_t record = weights.nearest_record(t);
  const std::size_t step = weights.recorded_steps[record];
  const double time = weights.grid.time(step);
  const auto logs = log_weights_at(weights, record);

  double extra = 0.0;
  double disc = std::numeric_limits<double>::quiet_NaN();
  if (!weights.exact) {
    const auto coarse = coarse_log_weights_at(weights, record);
    if (!coarse.empty() && std::isfinite(coarse.front())) {
      const double fine = girsanov_entropy_from_log_weights(logs, weights.n, time).value;
      disc = fine - girsanov_entropy_from_log_weights(coarse, weights.n, time).value;
      extra = disc * disc;
    }
  }
  EntropyReport full = girsanov_entropy_from_log_weights(logs, weights.n, time, extra);
  full.params["hurst"] = weights.hurst;
  full.params["eps"] = weights.eps;
  full.params["dt"] = weights.grid.dt();
  if (!weights.exact) {
    full.params["discretization_gap"] = disc;
    full.notes.emplace_back("fractional exponent: Volterra discretization gap folded into std_error");
  }
  if (std::abs(time - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    full.notes.emplace_back("time snapped to the nearest recorded step");
  }
  EntropyReport sub = full;
  sub.kind = EstimatorKind::girsanov_subadditive;
  sub.k = k;
  const double ratio = static_cast<double>(k) / static_cast<double>(weights.n);
  sub.value = ratio * full.value;
  sub.std_error = ratio * full.std_error;
  sub.notes.emplace_back("subadditivity surrogate (k/n) H_full; an upper bound, not a k-marginal estimate");
  return {full, sub};
}

EntropyReport entropy_knn(const SampleMatrix& p, const SampleMatrix& q, std::size_t neighbors, Metric metric) {
  if (p.cols != q.cols || p.cols == 0) throw EstimatorError("entropy_knn: dimension mismatch");
  if (p.rows < 100 || q.rows < 100) throw EstimatorError("entropy_knn: needs at least 100 samples per side");
  if (neighbors < 1 || neighbors >= p.rows) throw EstimatorError("entropy_knn: invalid neighbour count");
  const std::size_t dim = p.cols;
  const VpTree tree_p(p.data, dim, metric);
  const VpTree tree_q(q.data, dim, metric);
  constexpr double kFloor = 1e-12;
  std::size_t jittered = 0;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const auto x = p.row(i);
    double rho = tree_p.nearest(x, neighbors, i).back().first;
    double nu = tree_q.nearest(x, neighbors).back().first;
    if (rho < kFloor) {
      rho = kFloor;
      ++jittered;
    }
    if (nu < kFloor) {
      nu = kFloor;
      ++jittered;
    }
    const double term = static_cast<double>(dim) * std::log(nu / rho);
    sum += term;
    sum_sq += term * term;
  }
  const double nrows = static_cast<double>(p.rows);
  const double mean = sum / nrows;
  const double var = std::max(0.0, (sum_sq / nrows - mean * mean) * nrows / (nrows - 1.0));
  EntropyReport rep;
  rep.kind = EstimatorKind::knn;
  rep.value = mean + std::log(static_cast<double>(q.rows) / (nrows - 1.0));
  rep.std_error = std::sqrt(var / nrows);
  rep.ess = nrows;
  rep.params["neighbors"] = static_cast<double>(neighbors);
  rep.params["samples_p"] = nrows;
  rep.params["samples_q"] = static_cast<double>(q.rows);
  rep.params["jittered"] = static_cast<double>(jittered);
  rep.notes.emplace_back("nearest-neighbour KL estimate; finite-sample bias not corrected");
  if (jittered > 0) rep.notes.emplace_back("duplicate points floored at distance 1e-12");
  return rep;
}

EntropyReport tv_histogram(const SampleMatrix& p, const SampleMatrix& q, std::size_t bins_per_dim,
                           std::optional<std::pair<double, double>> range, bool torus) {
  if (p.cols != q.cols || p.cols == 0) throw EstimatorError("tv_histogram: dimension mismatch");
  if (p.cols > 4) {
    throw EstimatorError("tv_histogram: sample dimension above 4; use entropy_knn with Pinsker instead");
  }
  if (bins_per_dim < 1) throw EstimatorError("tv_histogram: need at least one bin");
  if (p.rows == 0 || q.rows == 0) throw EstimatorError("tv_histogram: empty sample");
  const std::size_t dim = p.cols;
  std::vector<double> lo(dim), hi(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    if (range) {
      lo[c] = range->first;
      hi[c] = range->second;
    } else if (torus) {
      lo[c] = -0.5;
      hi[c] = 0.5;
    } else {
      lo[c] = std::numeric_limits<double>::infinity();
      hi[c] = -std::numeric_limits<double>::infinity();
      for (const SampleMatrix* s : {&p, &q}) {
        for (std::size_t r = 0; r < s->rows; ++r) {
          lo[c] = std::min(lo[c], s->row(r)[c]);
          hi[c] = std::max(hi[c], s->row(r)[c]);
        }
      }
      hi[c] = std::nextafter(hi[c], std::numeric_limits<double>::infinity());
    }
    if (!(hi[c] > lo[c])) throw EstimatorError("tv_histogram: empty range");
  }
  std::size_t cells = 1;
  for (std::size_t c = 0; c < dim; ++c) cells *= bins_per_dim;
  const std::size_t overflow = cells;
  auto bin_of = [&](std::span<const double> x) {
    std::size_t index = 0;
    for (std::size_t c = 0; c < dim; ++c) {
      if (!(x[c] >= lo[c] && x[c] < hi[c])) return overflow;
      auto b = static_cast<std::size_t>((x[c] - lo[c]) / (hi[c] - lo[c]) * static_cast<double>(bins_per_dim));
      b = std::min(b, bins_per_dim - 1);
      index = index * bins_per_dim + b;
    }
    return index;
  };
  std::vector<double> hp(cells + 1, 0.0), hq(cells + 1, 0.0);
  for (std::size_t r = 0; r < p.rows; ++r) hp[bin_of(p.row(r))] += 1.0;
  for (std::size_t r = 0; r < q.rows; ++r) hq[bin_of(q.row(r))] += 1.0;
  const double np = static_cast<double>(p.rows);
  const double nq = static_cast<double>(q.rows);
  double tv = 0.0, ep = 0.0, ep2 = 0.0, eq = 0.0, eq2 = 0.0;
  for (std::size_t b = 0; b <= cells; ++b) {
    const double a = hp[b] / np;
    const double c = hq[b] / nq;
    tv += std::abs(a - c);
    const double s = a > c ? 1.0 : (a < c ? -1.0 : 0.0);
    ep += a * s;
    ep2 += a * s * s;
    eq += c * s;
    eq2 += c * s * s;
  }
  EntropyReport rep;
  rep.kind = EstimatorKind::histogram_tv;
  rep.value = 0.5 * tv;
  rep.std_error = 0.5 * std::sqrt(std::max(0.0, ep2 - ep * ep) / np + std::max(0.0, eq2 - eq * eq) / nq);
  rep.ess = np;
  rep.params["bins_per_dim"] = static_cast<double>(bins_per_dim);
  rep.params["samples_p"] = np;
  rep.params["samples_q"] = nq;
  rep.params["overflow_p"] = hp[overflow];
  rep.params["overflow_q"] = hq[overflow];
  return rep;
}

std::size_t capped_tv_bins(std::size_t requested, std::size_t samples, std::size_t dim) {
  if (dim == 0) return requested;
  const double per_axis = std::pow(static_cast<double>(samples) / 20.0, 1.0 / static_cast<double>(dim));
  const auto cap = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(per_axis + 1e-9)));
  return std::min(requested, cap);
}

}  // namespace mfchaos
