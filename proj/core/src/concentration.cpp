#include "mfchaos/concentration.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mfchaos/errors.hpp"

namespace mfchaos {

namespace {

BoundValue from_log(double log_value) {
  if (log_value > std::log(std::numeric_limits<double>::max())) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {std::exp(log_value), false};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

double get(const std::map<std::string, double>& params, const char* key) {
  const auto it = params.find(key);
  if (it == params.end()) throw DomainError(std::string("missing parameter '") + key + "'");
  return it->second;
}

int get_order(const std::map<std::string, double>& params, const char* key) {
  const double v = get(params, key);
  if (v < 1.0 || v != std::floor(v)) throw DomainError(std::string(key) + " must be an integer >= 1");
  return static_cast<int>(v);
}

}  // namespace

BoundValue hoeffding_bound(double n, double eps, double b) {
  require_positive(n, "n");
  require_positive(eps, "eps");
  require_positive(b, "b");
  return {std::exp(-n * eps * eps / (2.0 * b * b)), false};
}

BoundValue moment_bound(int q, double v) {
  if (q < 1) throw DomainError("q must be >= 1");
  require_positive(v, "v");
  return from_log(std::log(2.0) + log_factorial(q) + q * std::log(2.0 * v));
}

BoundValue increment_moment_bound(int p, double beta, double delta, double n) {
  if (p < 1) throw DomainError("p must be >= 1");
  require_positive(beta, "beta");
  require_positive(delta, "delta");
  require_positive(n, "n");
  return from_log(log_factorial(p) + p * (std::log(beta) + std::log(delta) - std::log(n)));
}

BoundValue fractional_moment_bound(int p, double beta, double delta, double n, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("H must lie in (0, 1)");
  if (p < 1) throw DomainError("p must be >= 1");
  require_positive(beta, "beta");
  require_positive(delta, "delta");
  require_positive(n, "n");
  return from_log(log_factorial(p) +
                  p * (std::log(beta) + (2.0 - 2.0 * hurst) * std::log(delta) - std::log(n)));
}

BoundValue concentration_bounds(ConcentrationKind kind, const std::map<std::string, double>& params) {
  switch (kind) {
    case ConcentrationKind::hoeffding:
      return hoeffding_bound(get(params, "n"), get(params, "eps"), get(params, "b"));
    case ConcentrationKind::moment:
      return moment_bound(get_order(params, "q"), get(params, "v"));
    case ConcentrationKind::increment_moment:
      return increment_moment_bound(get_order(params, "p"), get(params, "beta"), get(params, "delta"),
                                    get(params, "n"));
    case ConcentrationKind::fractional_moment:
      return fractional_moment_bound(get_order(params, "p"), get(params, "beta"), get(params, "delta"),
                                     get(params, "n"), get(params, "H"));
  }
  throw DomainError("unknown concentration bound");
}

}  // namespace mfchaos
