#include "engine.hpp"

#include <cmath>

#include "mfchaos/torus.hpp"

namespace mfchaos::detail {

void draw_initial(const SimConfig& config, std::uint64_t seed, std::size_t replica,
                  std::size_t particle, std::span<double> x0) {
  const std::size_t d = config.dim;
  const InitialLaw& law = config.initial;
  switch (law.kind) {
    case InitialLaw::Kind::uniform: {
      RngStream rng(seed, replica, particle, kStreamInitial);
      for (std::size_t c = 0; c < d; ++c) x0[c] = rng.uniform() - 0.5;
      break;
    }
    case InitialLaw::Kind::gaussian: {
      RngStream rng(seed, replica, particle, kStreamInitial);
      for (std::size_t c = 0; c < d; ++c) x0[c] = law.sigma * rng.normal();
      break;
    }
    case InitialLaw::Kind::ball: {
      RngStream rng(seed, replica, particle, kStreamInitial);
      double sq = 0.0;
      do {
        sq = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          x0[c] = rng.normal();
          sq += x0[c] * x0[c];
        }
      } while (sq == 0.0);
      const double r = law.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
      const double s = r / std::sqrt(sq);
      for (std::size_t c = 0; c < d; ++c) x0[c] *= s;
      break;
    }
    case InitialLaw::Kind::points: {
      const auto& p = law.points[particle % law.points.size()];
      for (std::size_t c = 0; c < d; ++c) x0[c] = p[c];
      break;
    }
  }
  if (config.on_torus()) wrap_in_place(x0.first(d));
}

std::shared_ptr<const FbmGenerator> make_fbm_generator(const SimConfig& config) {
  if (config.noise != NoiseKind::fbm) return nullptr;
  return std::make_shared<const FbmGenerator>(config.grid.steps(), config.grid.dt(), config.hurst);
}

IncrementSource::IncrementSource(const SimConfig& config, const FbmGenerator* fbm,
                                 std::uint64_t seed, std::size_t replica, std::size_t first,
                                 std::size_t count, std::uint64_t base_stream,
                                 bool force_brownian)
    : dim_(config.dim),
      count_(count),
      sqrt_dt_(std::sqrt(config.grid.dt())),
      brownian_(force_brownian || config.noise == NoiseKind::brownian || fbm == nullptr),
      steps_(config.grid.steps()) {
  streams_.reserve(count * dim_);
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t c = 0; c < dim_; ++c) streams_.emplace_back(seed, replica, first + p, base_stream + c);
  }
  if (!brownian_) {
    increments_.resize(count * dim_ * steps_);
    for (std::size_t q = 0; q < streams_.size(); ++q) {
      fbm->increments(streams_[q], std::span<double>(increments_).subspan(q * steps_, steps_));
    }
  }
}

void IncrementSource::next(std::size_t k, std::span<double> out) {
  if (brownian_) {
    for (std::size_t q = 0; q < streams_.size(); ++q) out[q] = sqrt_dt_ * streams_[q].normal();
    return;
  }
  for (std::size_t q = 0; q < streams_.size(); ++q) out[q] = increments_[q * steps_ + k];
}

}  // namespace mfchaos::detail
