#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfchaos/time_grid.hpp"

namespace mfchaos {

enum class DomainKind { torus, euclidean };
enum class NoiseKind { brownian, fbm };

/// Named parameters; every value is a number or a list of numbers.
using Params = std::map<std::string, std::vector<double>>;

/// Scalar parameter lookup with a default.
double param_or(const Params& params, const std::string& key, double fallback);

/// A built-in term selected by name.
struct TermSpec {
  std::string name = "zero";
  Params params;
};

struct InitialLaw {
  enum class Kind { uniform, gaussian, ball, points };
  Kind kind = Kind::uniform;
  double sigma = 1.0;   // gaussian
  double radius = 1.0;  // ball
  /// Particle i starts at points[i % points.size()].
  std::vector<std::vector<double>> points;
};

struct NumericsConfig {
  std::optional<double> eps;  // unset: sqrt(dt) / 10
  int lattice_radius = 8;
};

struct MeanFieldConfig {
  std::size_t samples = 10000;
  std::size_t iterations = 3;
  /// Law samples used by interaction terms without a closed-form average.
  std::size_t average_cap = 2000;
};

/// One simulation experiment. Invariants are enforced by validate().
struct SimConfig {
  DomainKind domain = DomainKind::torus;
  std::size_t dim = 2;
  std::size_t n_particles = 2;
  TimeGrid grid{0.0, 1e-3, 1000};
  NoiseKind noise = NoiseKind::brownian;
  double hurst = 0.5;
  double noise_scale = 1.0;
  TermSpec b0;
  TermSpec interaction;
  InitialLaw initial;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;
  NumericsConfig numerics;
  MeanFieldConfig mean_field;

  /// Hurst index of the driver (0.5 for Brownian noise).
  double effective_hurst() const noexcept { return noise == NoiseKind::fbm ? hurst : 0.5; }
  double regularization_eps() const;
  bool on_torus() const noexcept { return domain == DomainKind::torus; }

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Parses and validates a configuration. Unknown keys are rejected at every
/// nesting level.
SimConfig parse_config(std::string_view json_text);
SimConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (round-trips through parse_config).
std::string config_to_json(const SimConfig& config, int indent = 2);

std::string to_string(DomainKind kind);
std::string to_string(NoiseKind kind);

}  // namespace mfchaos
