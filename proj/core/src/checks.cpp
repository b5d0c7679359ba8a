#include "mfchaos/checks.hpp"

#include <algorithm>
#include <cmath>

#include "mfchaos/errors.hpp"

namespace mfchaos {

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

}  // namespace

double combined_tolerance(const EntropyReport& h_k, const EntropyReport& tv, const EntropyReport& h_full) {
  // One-sigma upward move of the Pinsker ceiling sqrt(2 H); finite at H = 0.
  const double h = std::max(0.0, h_k.value);
  const double a = std::sqrt(2.0 * (h + h_k.std_error)) - std::sqrt(2.0 * h);
  return 3.0 * std::sqrt(a * a + tv.std_error * tv.std_error + h_full.std_error * h_full.std_error);
}

ConsistencyCheck pinsker_and_subadditivity_check(const EntropyReport& h_k, const EntropyReport& tv,
                                                 const EntropyReport& h_full, double tolerance) {
  if (h_k.k != tv.k || h_k.n != tv.n || !same_time(h_k.t, tv.t)) {
    throw DomainError("consistency check: entropy and TV reports disagree on (k, n, t)");
  }
  if (h_full.k != h_full.n || h_full.n != h_k.n || !same_time(h_full.t, h_k.t)) {
    throw DomainError("consistency check: full-system report does not match (n, t)");
  }
  if (!(tolerance >= 0.0)) throw DomainError("consistency check: tolerance must be >= 0");
  ConsistencyCheck c;
  c.tolerance = tolerance;
  c.pinsker_margin = std::sqrt(2.0 * std::max(0.0, h_k.value)) + tolerance - tv.value;
  const double ratio = static_cast<double>(h_k.k) / static_cast<double>(h_k.n);
  c.subadditivity_margin = ratio * h_full.value + tolerance - h_k.value;
  c.pinsker_pass = c.pinsker_margin >= 0.0;
  c.subadditivity_pass = c.subadditivity_margin >= -1e-12;
  c.pass = c.pinsker_pass && c.subadditivity_pass;
  return c;
}

ReducedPinsker reduced_pinsker_check(const SampleMatrix& mu, const SampleMatrix& nu,
                                     const std::function<double(std::span<const double>)>& phi,
                                     double h_estimate) {
  if (mu.rows == 0 || nu.rows == 0) throw DomainError("reduced_pinsker_check: empty sample");
  double m1 = 0.0, m2 = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t r = 0; r < mu.rows; ++r) {
    const double v = phi(mu.row(r));
    m1 += v;
    m2 += v * v;
  }
  for (std::size_t r = 0; r < nu.rows; ++r) {
    const double v = phi(nu.row(r));
    n1 += v;
    n2 += v * v;
  }
  m1 /= static_cast<double>(mu.rows);
  m2 /= static_cast<double>(mu.rows);
  n1 /= static_cast<double>(nu.rows);
  n2 /= static_cast<double>(nu.rows);
  ReducedPinsker out;
  out.lhs = (m1 - n1) * (m1 - n1);
  out.constant = m2 / 6.0 + n2 / 3.0;
  out.rhs = 4.0 * out.constant * h_estimate;
  out.residual = out.rhs - out.lhs;
  return out;
}

}  // namespace mfchaos
