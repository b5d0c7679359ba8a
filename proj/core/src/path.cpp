#include "mfchaos/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfchaos/errors.hpp"

namespace mfchaos {

std::span<const double> PathView::at(std::size_t s) const {
  if (s > step_) {
    throw DomainError("path access at step " + std::to_string(s) + " beyond current step " +
                      std::to_string(step_));
  }
  return {base_ + s * stride_, dim_};
}

double PathView::sup_norm() const noexcept {
  double best = 0.0;
  for (std::size_t s = 0; s <= step_; ++s) {
    const double* p = base_ + s * stride_;
    double sq = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) sq += p[c] * p[c];
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

}  // namespace mfchaos
