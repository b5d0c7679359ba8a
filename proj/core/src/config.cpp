#include "mfchaos/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "config_json.hpp"
#include "mfchaos/errors.hpp"

namespace mfchaos {

namespace {

using detail::Json;

struct TermRule {
  const char* name;
  std::vector<std::string> keys;
};

const std::vector<TermRule>& b0_rules() {
  static const std::vector<TermRule> rules = {
      {"zero", {}}, {"ou", {"theta"}}, {"constant", {"c"}}, {"quadratic", {}}};
  return rules;
}

const std::vector<TermRule>& interaction_rules() {
  static const std::vector<TermRule> rules = {
      {"zero", {}},           {"biot_savart_free", {}}, {"biot_savart_periodic", {}},
      {"smooth_divfree", {"m"}}, {"linear_sum", {}},     {"attraction", {}},
      {"mean_linear", {}},    {"quadratic", {}},        {"sin_indicator", {}},
      {"path_sup", {}}};
  return rules;
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double as_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::size_t as_count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError(where + ": expected an integer");
  }
  const auto v = j.get<long long>();
  if (v < 0) throw ConfigError(where + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

TermSpec parse_term(const Json& j, const std::vector<TermRule>& rules, bool growth_override,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  detail::reject_unknown_keys(j, {"name", "params"}, where);
  TermSpec term;
  term.name = as_string(require(j, "name", where), where + ".name");
  const TermRule* rule = nullptr;
  for (const auto& r : rules) {
    if (term.name == r.name) rule = &r;
  }
  if (rule == nullptr) throw ConfigError(where + ": unknown name '" + term.name + "'");
  if (j.contains("params")) {
    const Json& p = j.at("params");
    if (!p.is_object()) throw ConfigError(where + ".params: expected an object");
    std::vector<std::string> allowed = rule->keys;
    if (growth_override) allowed.emplace_back("growth_constant");
    detail::reject_unknown_keys(p, allowed, where + ".params");
    for (const auto& [key, value] : p.items()) {
      const std::string at = where + ".params." + key;
      if (value.is_array()) {
        std::vector<double> list;
        for (const auto& v : value) list.push_back(as_number(v, at));
        term.params[key] = std::move(list);
      } else {
        term.params[key] = {as_number(value, at)};
      }
    }
  }
  return term;
}

Json term_to_json(const TermSpec& term) {
  Json j = {{"name", term.name}};
  if (!term.params.empty()) {
    Json p = Json::object();
    for (const auto& [key, values] : term.params) {
      if (values.size() == 1) {
        p[key] = values.front();
      } else {
        p[key] = values;
      }
    }
    j["params"] = p;
  }
  return j;
}

}  // namespace

double param_or(const Params& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end() || it->second.empty()) return fallback;
  return it->second.front();
}

std::string to_string(DomainKind kind) { return kind == DomainKind::torus ? "torus" : "euclidean"; }
std::string to_string(NoiseKind kind) { return kind == NoiseKind::brownian ? "brownian" : "fbm"; }

double SimConfig::regularization_eps() const {
  return numerics.eps.value_or(std::sqrt(grid.dt()) / 10.0);
}

void SimConfig::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("domain.dim must be 1, 2 or 3");
  if (n_particles < 2) throw ConfigError("n_particles must be >= 2");
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  if (noise == NoiseKind::fbm && !(hurst > 0.0 && hurst < 1.0)) {
    throw ConfigError("noise.hurst must lie in (0, 1)");
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw ConfigError("noise.scale must be finite and >= 0");
  }
  if (numerics.eps && !(*numerics.eps >= 0.0)) throw ConfigError("numerics.eps must be >= 0");
  if (numerics.lattice_radius < 0) throw ConfigError("numerics.lattice_radius must be >= 0");
  if (mean_field.samples < 2) throw ConfigError("mean_field.samples must be >= 2");
  if (mean_field.iterations < 1) throw ConfigError("mean_field.iterations must be >= 1");
  if (mean_field.average_cap < 1) throw ConfigError("mean_field.average_cap must be >= 1");

  const std::string& k = interaction.name;
  const bool planar = k == "biot_savart_free" || k == "biot_savart_periodic" || k == "smooth_divfree";
  if (planar && dim != 2) throw ConfigError("interaction '" + k + "' requires dim = 2");
  if ((k == "biot_savart_periodic" || k == "smooth_divfree") && !on_torus()) {
    throw ConfigError("interaction '" + k + "' requires the torus domain");
  }
  if (k == "smooth_divfree" && param_or(interaction.params, "m", 1.0) < 1.0) {
    throw ConfigError("smooth_divfree.m must be >= 1");
  }
  if (b0.name == "constant") {
    const auto it = b0.params.find("c");
    if (it == b0.params.end() || (it->second.size() != 1 && it->second.size() != dim)) {
      throw ConfigError("b0 constant: 'c' must be a number or a vector of length dim");
    }
  }
  switch (initial.kind) {
    case InitialLaw::Kind::uniform:
      if (!on_torus()) throw ConfigError("initial 'uniform' is only defined on the torus");
      break;
    case InitialLaw::Kind::gaussian:
      if (!(initial.sigma > 0.0)) throw ConfigError("initial.sigma must be > 0");
      break;
    case InitialLaw::Kind::ball:
      if (!(initial.radius > 0.0)) throw ConfigError("initial.radius must be > 0");
      break;
    case InitialLaw::Kind::points:
      if (initial.points.empty()) throw ConfigError("initial.points must be nonempty");
      for (const auto& p : initial.points) {
        if (p.size() != dim) throw ConfigError("initial.points entries must have length dim");
        for (double v : p) {
          if (!std::isfinite(v)) throw ConfigError("initial.points must be finite");
        }
      }
      break;
  }
}

namespace detail {

void reject_unknown_keys(const Json& object, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    bool known = false;
    for (const auto& a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

SimConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown_keys(j,
                      {"domain", "n_particles", "time", "noise", "b0", "interaction", "initial",
                       "seed", "replicas", "numerics", "mean_field"},
                      "config");
  SimConfig c;

  const Json& dom = require(j, "domain", "config");
  reject_unknown_keys(dom, {"type", "dim"}, "domain");
  const std::string type = as_string(require(dom, "type", "domain"), "domain.type");
  if (type == "torus") {
    c.domain = DomainKind::torus;
  } else if (type == "euclidean") {
    c.domain = DomainKind::euclidean;
  } else {
    throw ConfigError("domain.type must be 'torus' or 'euclidean'");
  }
  c.dim = as_count(require(dom, "dim", "domain"), "domain.dim");

  c.n_particles = as_count(require(j, "n_particles", "config"), "n_particles");

  const Json& time = require(j, "time", "config");
  reject_unknown_keys(time, {"t0", "dt", "horizon", "steps"}, "time");
  const double t0 = time.contains("t0") ? as_number(time.at("t0"), "time.t0") : 0.0;
  const double dt = as_number(require(time, "dt", "time"), "time.dt");
  if (time.contains("horizon") == time.contains("steps")) {
    throw ConfigError("time: give exactly one of 'horizon' or 'steps'");
  }
  if (time.contains("horizon")) {
    c.grid = TimeGrid::from_horizon(t0, as_number(time.at("horizon"), "time.horizon"), dt);
  } else {
    c.grid = TimeGrid(t0, dt, as_count(time.at("steps"), "time.steps"));
  }

  if (j.contains("noise")) {
    const Json& noise = j.at("noise");
    reject_unknown_keys(noise, {"type", "hurst", "scale"}, "noise");
    const std::string kind = as_string(require(noise, "type", "noise"), "noise.type");
    if (kind == "brownian") {
      c.noise = NoiseKind::brownian;
      if (noise.contains("hurst")) throw ConfigError("noise.hurst is only valid for fbm");
    } else if (kind == "fbm") {
      c.noise = NoiseKind::fbm;
      c.hurst = as_number(require(noise, "hurst", "noise"), "noise.hurst");
    } else {
      throw ConfigError("noise.type must be 'brownian' or 'fbm'");
    }
    if (noise.contains("scale")) c.noise_scale = as_number(noise.at("scale"), "noise.scale");
  }

  if (j.contains("b0")) c.b0 = parse_term(j.at("b0"), b0_rules(), false, "b0");
  if (j.contains("interaction")) {
    c.interaction = parse_term(j.at("interaction"), interaction_rules(), true, "interaction");
  }

  if (j.contains("initial")) {
    const Json& init = j.at("initial");
    const std::string kind = as_string(require(init, "type", "initial"), "initial.type");
    if (kind == "uniform") {
      reject_unknown_keys(init, {"type"}, "initial");
      c.initial.kind = InitialLaw::Kind::uniform;
    } else if (kind == "gaussian") {
      reject_unknown_keys(init, {"type", "sigma"}, "initial");
      c.initial.kind = InitialLaw::Kind::gaussian;
      if (init.contains("sigma")) c.initial.sigma = as_number(init.at("sigma"), "initial.sigma");
    } else if (kind == "ball") {
      reject_unknown_keys(init, {"type", "radius"}, "initial");
      c.initial.kind = InitialLaw::Kind::ball;
      if (init.contains("radius")) c.initial.radius = as_number(init.at("radius"), "initial.radius");
    } else if (kind == "points") {
      reject_unknown_keys(init, {"type", "values"}, "initial");
      c.initial.kind = InitialLaw::Kind::points;
      const Json& values = require(init, "values", "initial");
      if (!values.is_array()) throw ConfigError("initial.values: expected an array");
      for (const auto& v : values) {
        std::vector<double> point;
        if (v.is_array()) {
          for (const auto& x : v) point.push_back(as_number(x, "initial.values"));
        } else {
          point.push_back(as_number(v, "initial.values"));
        }
        c.initial.points.push_back(std::move(point));
      }
    } else {
      throw ConfigError("initial.type must be uniform, gaussian, ball or points");
    }
  } else if (c.domain == DomainKind::euclidean) {
    c.initial.kind = InitialLaw::Kind::gaussian;
  }

  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer()) throw ConfigError("seed: expected an integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("replicas")) c.replicas = as_count(j.at("replicas"), "replicas");

  if (j.contains("numerics")) {
    const Json& num = j.at("numerics");
    reject_unknown_keys(num, {"eps", "lattice_radius"}, "numerics");
    if (num.contains("eps")) c.numerics.eps = as_number(num.at("eps"), "numerics.eps");
    if (num.contains("lattice_radius")) {
      c.numerics.lattice_radius =
          static_cast<int>(as_count(num.at("lattice_radius"), "numerics.lattice_radius"));
    }
  }
  if (j.contains("mean_field")) {
    const Json& mf = j.at("mean_field");
    reject_unknown_keys(mf, {"samples", "iterations", "average_cap"}, "mean_field");
    if (mf.contains("samples")) c.mean_field.samples = as_count(mf.at("samples"), "mean_field.samples");
    if (mf.contains("iterations")) {
      c.mean_field.iterations = as_count(mf.at("iterations"), "mean_field.iterations");
    }
    if (mf.contains("average_cap")) {
      c.mean_field.average_cap = as_count(mf.at("average_cap"), "mean_field.average_cap");
    }
  }

  c.validate();
  return c;
}

Json config_to_json_value(const SimConfig& c) {
  Json j;
  j["domain"] = {{"type", to_string(c.domain)}, {"dim", c.dim}};
  j["n_particles"] = c.n_particles;
  j["time"] = {{"t0", c.grid.t0()}, {"dt", c.grid.dt()}, {"steps", c.grid.steps()}};
  Json noise = {{"type", to_string(c.noise)}, {"scale", c.noise_scale}};
  if (c.noise == NoiseKind::fbm) noise["hurst"] = c.hurst;
  j["noise"] = noise;
  j["b0"] = term_to_json(c.b0);
  j["interaction"] = term_to_json(c.interaction);
  Json init;
  switch (c.initial.kind) {
    case InitialLaw::Kind::uniform:
      init = {{"type", "uniform"}};
      break;
    case InitialLaw::Kind::gaussian:
      init = {{"type", "gaussian"}, {"sigma", c.initial.sigma}};
      break;
    case InitialLaw::Kind::ball:
      init = {{"type", "ball"}, {"radius", c.initial.radius}};
      break;
    case InitialLaw::Kind::points:
      init = {{"type", "points"}, {"values", c.initial.points}};
      break;
  }
  j["initial"] = init;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  Json num = {{"lattice_radius", c.numerics.lattice_radius}};
  if (c.numerics.eps) num["eps"] = *c.numerics.eps;
  j["numerics"] = num;
  j["mean_field"] = {{"samples", c.mean_field.samples},
                     {"iterations", c.mean_field.iterations},
                     {"average_cap", c.mean_field.average_cap}};
  return j;
}

}  // namespace detail

SimConfig parse_config(std::string_view json_text) {
  detail::Json j;
  try {
    j = detail::Json::parse(json_text);
  } catch (const detail::Json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return detail::config_from_json(j);
  } catch (const detail::Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const SimConfig& config, int indent) {
  return detail::config_to_json_value(config).dump(indent);
}

}  // namespace mfchaos
