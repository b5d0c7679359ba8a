#include "mfchaos/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfchaos/errors.hpp"

namespace mfchaos {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

inline Vec2 free_term(double x1, double x2) noexcept {
  const double r2 = x1 * x1 + x2 * x2;
  return {kInvTwoPi * x2 / r2, -kInvTwoPi * x1 / r2};
}

// Free term plus the image pairs (x - k) + (x + k) over shells 1..radius.
// Within a shell the half-lattice with k1 > 0, or k1 == 0 and k2 > 0, is
// visited in lexicographic order.
Vec2 lattice_sum(double x1, double x2, int radius) noexcept {
  Vec2 acc = free_term(x1, x2);
  for (int r = 1; r <= radius; ++r) {
    for (int k1 = 0; k1 <= r; ++k1) {
      for (int k2 = -r; k2 <= r; ++k2) {
        if (std::max(std::abs(k1), std::abs(k2)) != r) continue;
        if (k1 == 0 && k2 <= 0) continue;
        const Vec2 a = free_term(x1 - k1, x2 - k2);
        const Vec2 b = free_term(x1 + k1, x2 + k2);
        acc[0] += a[0] + b[0];
        acc[1] += a[1] + b[1];
      }
    }
  }
  return acc;
}

}  // namespace

Vec2 biot_savart_free(Vec2 x) {
  if (!std::isfinite(x[0]) || !std::isfinite(x[1])) throw DomainError("biot_savart_free: non-finite input");
  if (x[0] == 0.0 && x[1] == 0.0) throw SingularityError("biot_savart_free: x = 0");
  return free_term(x[0], x[1]);
}

Vec2 biot_savart_periodic(const TorusPoint& x, int radius, double eps) {
  if (x.dim() != 2) throw DomainError("biot_savart_periodic: requires d = 2");
  if (radius < 0) throw DomainError("biot_savart_periodic: radius must be >= 0");
  if (!(eps >= 0.0)) throw DomainError("biot_savart_periodic: eps must be >= 0");
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0 || r <= eps) throw SingularityError("biot_savart_periodic: |x| <= eps");
  return lattice_sum(x[0], x[1], radius);
}

Vec2 biot_savart_free_regularized(Vec2 x, double eps) {
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) return {0.0, 0.0};
  if (r > eps) return free_term(x[0], x[1]);
  const double s = eps / r;
  return free_term(x[0] * s, x[1] * s);
}

Vec2 biot_savart_periodic_regularized(Vec2 x, int radius, double eps) {
  const double x1 = wrap_coordinate(x[0]);
  const double x2 = wrap_coordinate(x[1]);
  const double r = std::hypot(x1, x2);
  if (r == 0.0) return {0.0, 0.0};
  if (r > eps) return lattice_sum(x1, x2, radius);
  const double s = eps / r;
  return lattice_sum(x1 * s, x2 * s, radius);
}

Vec2 smooth_divfree_kernel(const TorusPoint& x, int m) {
  if (x.dim() != 2) throw DomainError("smooth_divfree_kernel: requires d = 2");
  if (m < 1) throw DomainError("smooth_divfree_kernel: m must be >= 1");
  const double w = 2.0 * std::numbers::pi * m;
  return {std::sin(w * x[1]), std::sin(w * x[0])};
}

void KernelSpec::validate() const {
  switch (kind) {
    case Kind::biot_savart_periodic:
      if (truncation_radius < 1) throw DomainError("kernel: truncation radius must be >= 1");
      [[fallthrough]];
    case Kind::biot_savart_free:
    case Kind::smooth_divfree:
      if (dim != 2) throw DomainError("kernel: planar kernels require d = 2");
      break;
    case Kind::custom:
      if (!custom) throw DomainError("kernel: custom kind without a callable");
      break;
  }
  if (!(regularization_eps >= 0.0)) throw DomainError("kernel: regularization eps must be >= 0");
  if (kind == Kind::smooth_divfree && frequency < 1) throw DomainError("kernel: frequency must be >= 1");
}

void KernelSpec::evaluate(std::span<const double> x, std::span<double> out) const {
  switch (kind) {
    case Kind::biot_savart_free: {
      const Vec2 v = biot_savart_free_regularized({x[0], x[1]}, regularization_eps);
      out[0] = v[0];
      out[1] = v[1];
      return;
    }
    case Kind::biot_savart_periodic: {
      const Vec2 v = biot_savart_periodic_regularized({x[0], x[1]}, truncation_radius,
                                                      regularization_eps);
      out[0] = v[0];
      out[1] = v[1];
      return;
    }
    case Kind::smooth_divfree: {
      const double w = 2.0 * std::numbers::pi * frequency;
      out[0] = std::sin(w * x[1]);
      out[1] = std::sin(w * x[0]);
      return;
    }
    case Kind::custom:
      custom(x, out);
      return;
  }
}

double numeric_divergence(const std::function<Vec2(Vec2)>& kernel, Vec2 x, double h) {
  const Vec2 xp1 = kernel({x[0] + h, x[1]});
  const Vec2 xm1 = kernel({x[0] - h, x[1]});
  const Vec2 xp2 = kernel({x[0], x[1] + h});
  const Vec2 xm2 = kernel({x[0], x[1] - h});
  return (xp1[0] - xm1[0]) / (2.0 * h) + (xp2[1] - xm2[1]) / (2.0 * h);
}

double grid_lp_integral(const std::function<Vec2(Vec2)>& kernel, std::size_t cells_per_axis,
                        double p) {
  if (cells_per_axis == 0) throw DomainError("grid_lp_integral: empty grid");
  if (!(p > 0.0)) throw DomainError("grid_lp_integral: p must be > 0");
  const double h = 1.0 / static_cast<double>(cells_per_axis);
  double sum = 0.0;
  for (std::size_t a = 0; a < cells_per_axis; ++a) {
    const double x1 = -0.5 + (static_cast<double>(a) + 0.5) * h;
    for (std::size_t b = 0; b < cells_per_axis; ++b) {
      const double x2 = -0.5 + (static_cast<double>(b) + 0.5) * h;
      const Vec2 v = kernel({x1, x2});
      sum += std::pow(std::hypot(v[0], v[1]), p);
    }
  }
  return sum * h * h;
}

}  // namespace mfchaos
