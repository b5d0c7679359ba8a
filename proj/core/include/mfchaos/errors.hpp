#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfchaos {

/// Input outside the mathematical domain of an operation (non-finite point,
/// Hurst index outside (0,1), dimension mismatch, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Kernel evaluated inside its singular ball without regularization.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite state produced by the integrator.
class SimulationBlowUp : public std::runtime_error {
 public:
  SimulationBlowUp(std::size_t step, std::size_t particle, std::size_t replica)
      : std::runtime_error("non-finite state at step " + std::to_string(step) +
                           ", particle " + std::to_string(particle) +
                           ", replica " + std::to_string(replica)),
        step_(step),
        particle_(particle),
        replica_(replica) {}

  std::size_t step() const noexcept { return step_; }
  std::size_t particle() const noexcept { return particle_; }
  std::size_t replica() const noexcept { return replica_; }

 private:
  std::size_t step_;
  std::size_t particle_;
  std::size_t replica_;
};

/// An estimator or solver refused its input (too few samples, unstable
/// step size, histogram dimension too high, ...).
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfchaos
