#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

#include "mfchaos/torus.hpp"

namespace mfchaos {

using Vec2 = std::array<double, 2>;

/// Free-space Biot-Savart kernel (1/2pi) x_perp / |x|^2, x_perp = (x2, -x1).
/// Throws SingularityError at x = 0.
Vec2 biot_savart_free(Vec2 x);

/// Periodic Biot-Savart kernel: the free term plus the lattice images
/// k in Z^2 with 0 < |k|_inf <= radius. Images are added shell by shell in a
/// fixed order, each k together with -k, so K(-x) = -K(x) holds bit for bit.
/// Throws SingularityError when the minimal-image |x| <= eps (or x = 0).
Vec2 biot_savart_periodic(const TorusPoint& x, int radius, double eps);

/// Simulation variants: inside the eps-ball the kernel is frozen at its value
/// on the eps-sphere in the direction of x; the origin maps to 0.
Vec2 biot_savart_free_regularized(Vec2 x, double eps);
Vec2 biot_savart_periodic_regularized(Vec2 x, int radius, double eps);

/// (sin 2 pi m x2, sin 2 pi m x1): smooth, periodic, exactly divergence free.
Vec2 smooth_divfree_kernel(const TorusPoint& x, int m);

/// An interaction kernel K on T^2 or R^2 evaluated on displacements.
struct KernelSpec {
  enum class Kind { biot_savart_free, biot_savart_periodic, smooth_divfree, custom };

  Kind kind = Kind::smooth_divfree;
  std::size_t dim = 2;
  int truncation_radius = 8;
  double regularization_eps = 0.0;
  int frequency = 1;
  std::function<void(std::span<const double>, std::span<double>)> custom;

  /// Throws DomainError on violated invariants (planar kinds need d = 2,
  /// radius >= 1 for the periodic kind, eps >= 0, custom callable set).
  void validate() const;

  /// Kernel at displacement x (already minimal-image on the torus); the
  /// Biot-Savart kinds use the eps-frozen variants.
  void evaluate(std::span<const double> x, std::span<double> out) const;
};

/// Central-difference divergence sum_i dK_i/dx_i at x with step h.
double numeric_divergence(const std::function<Vec2(Vec2)>& kernel, Vec2 x, double h);

/// Midpoint-rule integral of |K|^p over N x N cell centres of [-1/2, 1/2)^2.
double grid_lp_integral(const std::function<Vec2(Vec2)>& kernel, std::size_t cells_per_axis,
                        double p);

}  // namespace mfchaos
