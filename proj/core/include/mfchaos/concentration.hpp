#pragma once

#include <map>
#include <string>

namespace mfchaos {

/// A closed-form bound. Values that overflow double are +inf with
/// `overflow` set.
struct BoundValue {
  double value = 0.0;
  bool overflow = false;
};

/// Sub-Gaussian tail bound P(|mean - E| >= eps) <= exp(-n eps^2 / (2 b^2)).
BoundValue hoeffding_bound(double n, double eps, double b);

/// Moment bound E[X^{2q}] <= 2 q! (2 v)^q for a v-sub-Gaussian X.
BoundValue moment_bound(int q, double v);

/// Exponential-moment increment bound p! beta^p delta^p / n^p.
BoundValue increment_moment_bound(int p, double beta, double delta, double n);

/// Fractional counterpart p! beta^p delta^{(2 - 2H) p} / n^p.
BoundValue fractional_moment_bound(int p, double beta, double delta, double n, double hurst);

enum class ConcentrationKind { hoeffding, moment, increment_moment, fractional_moment };

/// Dispatch by kind with named parameters: hoeffding {n, eps, b};
/// moment {q, v}; increment_moment {p, beta, delta, n};
/// fractional_moment {p, beta, delta, n, H}. Throws DomainError on missing
/// or non-positive parameters.
BoundValue concentration_bounds(ConcentrationKind kind, const std::map<std::string, double>& params);

}  // namespace mfchaos
