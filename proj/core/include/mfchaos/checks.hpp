#pragma once

#include <functional>
#include <span>

#include "mfchaos/dynamics.hpp"
#include "mfchaos/entropy.hpp"

namespace mfchaos {

/// Outcome of the Pinsker and subadditivity comparisons. Margins are
/// (allowed - observed); a check passes when its margin is >= 0.
struct ConsistencyCheck {
  double pinsker_margin = 0.0;     // sqrt(2 H_k) + tolerance - TV
  double subadditivity_margin = 0.0;  // (k/n) H_full + tolerance - H_k
  bool pinsker_pass = false;
  bool subadditivity_pass = false;
  bool pass = false;
  double tolerance = 0.0;
};

/// 3 sqrt(a^2 + se_TV^2 + se_full^2), where a = sqrt(2 (H_k + se_k)) - sqrt(2 H_k)
/// is the one-sigma move of the Pinsker ceiling (H_k clipped at 0).
double combined_tolerance(const EntropyReport& h_k, const EntropyReport& tv, const EntropyReport& h_full);

/// TV <= sqrt(2 H_k) + tolerance and H_k <= (k/n) H_full + tolerance.
/// Throws DomainError when (k, n, t) of h_k and tv differ, or h_full is not
/// a full-system report (k == n) of the same n and t.
ConsistencyCheck pinsker_and_subadditivity_check(const EntropyReport& h_k, const EntropyReport& tv,
                                                 const EntropyReport& h_full, double tolerance);

/// Monte Carlo sides of (int phi d(mu - nu))^2 <= 4 C H with
/// C = (1/6) int phi^2 dmu + (1/3) int phi^2 dnu.
struct ReducedPinsker {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // rhs - lhs
};

ReducedPinsker reduced_pinsker_check(const SampleMatrix& mu, const SampleMatrix& nu,
                                     const std::function<double(std::span<const double>)>& phi,
                                     double h_estimate);

}  // namespace mfchaos
