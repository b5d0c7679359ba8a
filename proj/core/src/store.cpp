#include "mfchaos/store.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <charconv>
#include <fstream>
#include <ostream>

#include "config_json.hpp"
#include "mfchaos/csv.hpp"
#include "mfchaos/errors.hpp"

namespace mfchaos {

namespace {

std::filesystem::path manifest_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

std::size_t to_index(const std::string& s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("store: bad index '" + s + "'");
  return v;
}

}  // namespace

std::map<std::string, std::string> library_versions() {
  return {
      {"mfchaos", MFCHAOS_VERSION},
      {"fftw", fftw_version},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
  };
}

void write_trajectory_csv(const ParticleEnsemble& ensemble, std::ostream& out) {
  std::vector<std::string> header{"replica", "particle", "step"};
  for (std::size_t c = 0; c < ensemble.dim; ++c) header.push_back("x" + std::to_string(c + 1));
  CsvWriter csv(out, header);
  for (std::size_t r = 0; r < ensemble.replicas; ++r) {
    for (std::size_t rec = 0; rec < ensemble.recorded_steps.size(); ++rec) {
      for (std::size_t i = 0; i < ensemble.n; ++i) {
        auto row = csv.row();
        row << r << i << ensemble.recorded_steps[rec];
        for (double x : ensemble.state(r, rec, i)) row << x;
        row.end();
      }
    }
  }
}

void save_ensemble(const ParticleEnsemble& ensemble, const SimConfig& config, std::string_view kind,
                   const std::filesystem::path& csv_path) {
  {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot write " + csv_path.string());
    write_trajectory_csv(ensemble, out);
  }
  detail::Json m;
  m["kind"] = std::string(kind);
  m["seed"] = config.seed;
  m["eps"] = ensemble.eps;
  m["lattice_radius"] = ensemble.lattice_radius;
  m["dt"] = ensemble.grid.dt();
  m["t0"] = ensemble.grid.t0();
  m["steps"] = ensemble.grid.steps();
  m["replicas"] = ensemble.replicas;
  m["n"] = ensemble.n;
  m["dim"] = ensemble.dim;
  m["hurst"] = ensemble.hurst;
  m["noise_scale"] = ensemble.noise_scale;
  m["b0"] = ensemble.b0;
  m["interaction"] = ensemble.interaction;
  m["fbm_fallback"] = ensemble.fbm_fallback;
  m["recorded_steps"] = ensemble.recorded_steps;
  m["config"] = detail::config_to_json_value(config);
  m["versions"] = library_versions();
  std::ofstream out(manifest_path(csv_path));
  if (!out) throw ConfigError("cannot write manifest for " + csv_path.string());
  out << m.dump(2) << '\n';
}

StoredEnsemble load_ensemble(const std::filesystem::path& csv_path) {
  std::ifstream in(manifest_path(csv_path));
  if (!in) throw ConfigError("store manifest not found for " + csv_path.string());
  detail::Json m;
  try {
    in >> m;
  } catch (const detail::Json::exception& e) {
    throw ConfigError(std::string("store manifest: ") + e.what());
  }
  StoredEnsemble stored;
  try {
    stored.kind = m.at("kind").get<std::string>();
    stored.config = detail::config_from_json(m.at("config"));
    auto& ens = stored.ensemble;
    ens.replicas = m.at("replicas").get<std::size_t>();
    ens.n = m.at("n").get<std::size_t>();
    ens.dim = m.at("dim").get<std::size_t>();
    ens.grid = TimeGrid(m.at("t0").get<double>(), m.at("dt").get<double>(), m.at("steps").get<std::size_t>());
    ens.domain = stored.config.domain;
    ens.recorded_steps = m.at("recorded_steps").get<std::vector<std::size_t>>();
    ens.eps = m.at("eps").get<double>();
    ens.lattice_radius = m.at("lattice_radius").get<int>();
    ens.hurst = m.at("hurst").get<double>();
    ens.noise_scale = m.at("noise_scale").get<double>();
    ens.b0 = m.at("b0").get<std::string>();
    ens.interaction = m.at("interaction").get<std::string>();
    ens.fbm_fallback = m.at("fbm_fallback").get<bool>();
  } catch (const detail::Json::exception& e) {
    throw ConfigError(std::string("store manifest: ") + e.what());
  }
  auto& ens = stored.ensemble;
  const std::size_t nrec = ens.recorded_steps.size();
  ens.states.assign(ens.replicas * nrec * ens.n * ens.dim, 0.0);
  const CsvTable table = read_csv(csv_path);
  if (table.header.size() != 3 + ens.dim) throw ConfigError("store: column count does not match dim");
  if (table.rows.size() != ens.replicas * nrec * ens.n) throw ConfigError("store: row count does not match manifest");
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw ConfigError("store: ragged row");
    const std::size_t r = to_index(row[0]);
    const std::size_t i = to_index(row[1]);
    const auto rec = ens.record_index(to_index(row[2]));
    if (r >= ens.replicas || i >= ens.n || !rec) throw ConfigError("store: row index out of range");
    auto x = ens.state(r, *rec, i);
    for (std::size_t c = 0; c < ens.dim; ++c) {
      const std::string& f = row[3 + c];
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc()) throw ConfigError("store: bad coordinate '" + f + "'");
      x[c] = v;
    }
  }
  return stored;
}

}  // namespace mfchaos
