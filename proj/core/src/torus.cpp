#include "mfchaos/torus.hpp"

#include <cmath>

#include "mfchaos/errors.hpp"

namespace mfchaos {

double wrap_coordinate(double x) noexcept {
  if (x >= -0.5 && x < 0.5) return x;
  double r = x - std::floor(x + 0.5);
  // x + 0.5 can round up to an integer for x just below a half-integer.
  if (r >= 0.5) r -= 1.0;
  if (r < -0.5) r += 1.0;
  return r;
}

void wrap_in_place(std::span<double> x) noexcept {
  for (double& v : x) v = wrap_coordinate(v);
}

TorusPoint::TorusPoint(std::span<const double> coords) : coords_(coords.begin(), coords.end()) {
  if (coords_.empty()) throw DomainError("torus point needs dimension >= 1");
  for (double& v : coords_) {
    if (!std::isfinite(v)) throw DomainError("torus point coordinate is not finite");
    v = wrap_coordinate(v);
  }
}

TorusPoint wrap_torus(std::span<const double> x) { return TorusPoint(x); }

void torus_displacement(std::span<const double> x, std::span<const double> y,
                        std::span<double> out) {
  if (x.size() != y.size() || out.size() != x.size()) {
    throw DomainError("torus_displacement: dimension mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = wrap_coordinate(x[i] - y[i]);
}

std::vector<double> torus_displacement(const TorusPoint& x, const TorusPoint& y) {
  std::vector<double> out(x.dim());
  torus_displacement(x.coords(), y.coords(), out);
  return out;
}

double torus_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = wrap_coordinate(x[i] - y[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace mfchaos
