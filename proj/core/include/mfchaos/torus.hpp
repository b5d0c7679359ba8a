#pragma once

#include <span>
#include <vector>

namespace mfchaos {

/// A point of the flat torus T^d = R^d / Z^d with every coordinate in the
/// fundamental domain [-1/2, 1/2).
class TorusPoint {
 public:
  /// Wraps `coords`; throws DomainError on non-finite input or d == 0.
  explicit TorusPoint(std::span<const double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

 private:
  std::vector<double> coords_;
};

/// Reduces one coordinate modulo 1 into [-1/2, 1/2). +1/2 maps to -1/2.
double wrap_coordinate(double x) noexcept;

/// Coordinate-wise wrap into the fundamental domain.
TorusPoint wrap_torus(std::span<const double> x);

/// In-place variant used on hot paths; does not validate finiteness.
void wrap_in_place(std::span<double> x) noexcept;

/// Minimal-image representative of x - y, each coordinate in [-1/2, 1/2).
std::vector<double> torus_displacement(const TorusPoint& x, const TorusPoint& y);

/// Raw-span variant writing into `out`; spans must have equal length.
void torus_displacement(std::span<const double> x, std::span<const double> y,
                        std::span<double> out);

/// Euclidean norm of the minimal-image displacement.
double torus_distance(std::span<const double> x, std::span<const double> y);

}  // namespace mfchaos
