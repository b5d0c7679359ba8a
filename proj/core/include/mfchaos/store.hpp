#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "mfchaos/config.hpp"
#include "mfchaos/dynamics.hpp"

namespace mfchaos {

/// Library name to version string for mfchaos and its numeric backends.
std::map<std::string, std::string> library_versions();

/// Rows `replica,particle,step,x1..xd`, ordered by replica, recorded step, particle.
void write_trajectory_csv(const ParticleEnsemble& ensemble, std::ostream& out);

/// An ensemble on disk: `<stem>.csv` plus a `<stem>.json` manifest holding
/// seed, eps, lattice radius, dt, the full config and library versions.
struct StoredEnsemble {
  std::string kind;  // "interacting" or "reference"
  SimConfig config;
  ParticleEnsemble ensemble;
};

void save_ensemble(const ParticleEnsemble& ensemble, const SimConfig& config, std::string_view kind,
                   const std::filesystem::path& csv_path);

/// Throws ConfigError when the manifest is missing or inconsistent with the rows.
StoredEnsemble load_ensemble(const std::filesystem::path& csv_path);

}  // namespace mfchaos
