#include "fkdv/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fkdv/soliton.hpp"

namespace fkdv {

namespace {

const double kDoublingEnergy = 0.75 * std::numbers::ln2;

std::string describe(const std::string& field, const std::string& message, int line) {
  std::ostringstream s;
  s << "config: " << field << ": " << message;
  if (line >= 0) s << " (line " << line << ")";
  return s.str();
}

template <class T>
void read(const YAML::Node& section, const std::string& prefix, const char* key, T& out) {
  const YAML::Node n = section[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(prefix + "." + key, "has the wrong type", n.Mark().line);
  }
}

template <class T>
void read_optional(const YAML::Node& section, const std::string& prefix, const char* key, std::optional<T>& out) {
  const YAML::Node n = section[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(prefix + "." + key, "has the wrong type", n.Mark().line);
  }
}

void reject_unknown(const YAML::Node& section, const std::string& prefix, std::initializer_list<const char*> keys) {
  if (!section) return;
  if (!section.IsMap()) throw ConfigError(prefix, "must be a mapping", section.Mark().line);
  for (const auto& kv : section) {
    const std::string k = kv.first.as<std::string>();
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ConfigError(prefix + "." + k, "unknown key", kv.first.Mark().line);
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& field, const std::string& message, int line)
    : std::runtime_error(describe(field, message, line < 0 ? -1 : line + 1)),
      field_(field),
      line_(line < 0 ? -1 : line + 1) {}

GridSpec RunConfig::grid() const { return make_grid(half_length, num_points); }

ForcingSpec RunConfig::forcing() const {
  ForcingSpec f;
  f.epsilon = epsilon;
  f.energy = energy;
  if (profile == "none") {
    f.profile = ForcingProfile::none();
  } else if (profile == "exp_decay") {
    f.profile = ForcingProfile::exp_decay(profile_scale);
  } else if (profile == "tabulated") {
    std::ifstream in(profile_table);
    if (!in) throw ConfigError("forcing.table", "cannot open '" + profile_table + "'");
    std::vector<double> tau, val;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double a, b;
      if (!(ls >> a >> b)) {
        if (tau.empty()) continue;  // header
        throw ConfigError("forcing.table", "malformed row " + std::to_string(lineno) + " in " + profile_table);
      }
      tau.push_back(a);
      val.push_back(profile_scale * b);
    }
    f.profile = ForcingProfile::tabulated(tau, val);
  } else {
    throw ConfigError("forcing.profile", "must be none, exp_decay or tabulated, got '" + profile + "'");
  }
  return f;
}

SolverConfig RunConfig::solver() const {
  SolverConfig s;
  s.dt = dt;
  s.scheme = scheme == "imex_cn" ? Scheme::imex_cn : Scheme::etdrk4;
  s.dealias = dealias;
  s.sponge.strength = sponge_strength;
  s.sponge.width_fraction = sponge_width;
  s.store_snapshots = false;
  return s;
}

WeightSchedule RunConfig::schedule() const {
  const double gamma = epsilon / energy;
  if (w_min && w_inf) {
    WeightSchedule s{*w_min, w, *w_inf, gamma};
    return s;
  }
  WeightSchedule s = default_schedule(w, energy, gamma);
  if (w_inf) s.w_inf = *w_inf;
  if (w_min) s.w_min = *w_min;
  return s;
}

double RunConfig::horizon_time() const {
  if (horizon) return *horizon;
  if (epsilon == 0.0) throw ConfigError("run.gamma_horizon", "needs epsilon > 0; give run.horizon instead");
  return gamma_horizon * energy / epsilon;
}

void RunConfig::validate() const {
  if (!(half_length > 0.0)) throw ConfigError("grid.half_length", "must be positive");
  if (num_points < 64 || num_points % 2) throw ConfigError("grid.num_points", "must be even and at least 64");
  if (!(c_star > 0.0)) throw ConfigError("soliton.c_star", "must be positive");
  if (tail_ratio(c_star, half_length) > 1e-14)
    throw ConfigError("grid.half_length", "box too small: soliton tail exceeds 1e-14 at the edge");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("forcing.epsilon", "must lie in [0, 1]");
  if (!(energy > 0.0)) throw ConfigError("forcing.energy", "must be positive");
  if (!(w > 0.0 && w < std::sqrt(c_star) / 3.0)) throw ConfigError("weights.w", "must lie in (0, sqrt(c_star)/3)");
  if (!(p >= 0.0 && p < 0.25)) throw ConfigError("run.p", "must lie in [0, 1/4)");
  if (!(dt > 0.0)) throw ConfigError("solver.dt", "must be positive");
  if (scheme != "etdrk4" && scheme != "imex_cn") throw ConfigError("solver.scheme", "must be etdrk4 or imex_cn");
  if (!(record_interval > 0.0)) throw ConfigError("run.record_interval", "must be positive");
  if (horizon && !(*horizon > 0.0)) throw ConfigError("run.horizon", "must be positive");
  if (!(gamma_horizon > 0.0)) throw ConfigError("run.gamma_horizon", "must be positive");
  if (sponge_strength < 0.0) throw ConfigError("solver.sponge_strength", "must be non-negative");
  if (!(sponge_width > 0.0 && sponge_width < 0.5)) throw ConfigError("solver.sponge_width", "must lie in (0, 0.5)");
  if (!(decay_band > 0.0 && decay_band < 1.0)) throw ConfigError("tolerances.decay_band", "must lie in (0, 1)");
  if (perturbation.kind == PerturbationKind::file && perturbation.file.empty())
    throw ConfigError("perturbation.file", "required for kind 'file'");
  if (!(perturbation.h1w_norm >= 0.0)) throw ConfigError("perturbation.h1w_norm", "must be non-negative");
  try {
    schedule().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("weights", e.what());
  }
  try {
    solver().validate(grid());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver", e.what());
  }
}

RunConfig parse_config(const std::string& yaml_text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.msg, e.mark.line);
  }
  RunConfig c;
  c.source = source;
  if (!root || root.IsNull()) {
    c.validate();
    return c;
  }
  if (!root.IsMap()) throw ConfigError("<document>", "top level must be a mapping");
  for (const auto& kv : root) {
    const std::string k = kv.first.as<std::string>();
    if (k != "grid" && k != "soliton" && k != "forcing" && k != "perturbation" && k != "weights" && k != "solver" &&
        k != "run" && k != "tolerances")
      throw ConfigError(k, "unknown section", kv.first.Mark().line);
  }

  const YAML::Node grid = root["grid"];
  reject_unknown(grid, "grid", {"half_length", "num_points"});
  if (grid) {
    read(grid, "grid", "half_length", c.half_length);
    read(grid, "grid", "num_points", c.num_points);
  }
  const YAML::Node sol = root["soliton"];
  reject_unknown(sol, "soliton", {"c_star", "xi_star"});
  if (sol) {
    read(sol, "soliton", "c_star", c.c_star);
    read(sol, "soliton", "xi_star", c.xi_star);
  }
  const YAML::Node f = root["forcing"];
  reject_unknown(f, "forcing", {"epsilon", "energy", "profile", "scale", "table"});
  if (f) {
    read(f, "forcing", "epsilon", c.epsilon);
    if (f["energy"] && f["energy"].IsScalar() && f["energy"].Scalar() == "doubling")
      c.energy = kDoublingEnergy;
    else
      read(f, "forcing", "energy", c.energy);
    read(f, "forcing", "profile", c.profile);
    read(f, "forcing", "scale", c.profile_scale);
    read(f, "forcing", "table", c.profile_table);
  }
  const YAML::Node pert = root["perturbation"];
  reject_unknown(pert, "perturbation", {"kind", "h1w_norm", "file"});
  if (pert) {
    std::string kind = "none";
    read(pert, "perturbation", "kind", kind);
    if (kind == "none") c.perturbation.kind = PerturbationKind::none;
    else if (kind == "odd") c.perturbation.kind = PerturbationKind::odd;
    else if (kind == "even") c.perturbation.kind = PerturbationKind::even;
    else if (kind == "random") c.perturbation.kind = PerturbationKind::random;
    else if (kind == "file") c.perturbation.kind = PerturbationKind::file;
    else throw ConfigError("perturbation.kind", "must be none, odd, even, random or file", pert["kind"].Mark().line);
    read(pert, "perturbation", "h1w_norm", c.perturbation.h1w_norm);
    read(pert, "perturbation", "file", c.perturbation.file);
  }
  const YAML::Node w = root["weights"];
  reject_unknown(w, "weights", {"w", "w_min", "w_inf"});
  if (w) {
    read(w, "weights", "w", c.w);
    read_optional(w, "weights", "w_min", c.w_min);
    read_optional(w, "weights", "w_inf", c.w_inf);
  }
  const YAML::Node s = root["solver"];
  reject_unknown(s, "solver", {"dt", "scheme", "dealias", "sponge_strength", "sponge_width", "comoving"});
  if (s) {
    read(s, "solver", "dt", c.dt);
    read(s, "solver", "scheme", c.scheme);
    read(s, "solver", "dealias", c.dealias);
    read(s, "solver", "sponge_strength", c.sponge_strength);
    read(s, "solver", "sponge_width", c.sponge_width);
    read(s, "solver", "comoving", c.comoving);
  }
  const YAML::Node r = root["run"];
  reject_unknown(r, "run", {"horizon", "gamma_horizon", "record_interval", "p", "seed", "snapshot_times", "output_dir"});
  if (r) {
    read_optional(r, "run", "horizon", c.horizon);
    read(r, "run", "gamma_horizon", c.gamma_horizon);
    read(r, "run", "record_interval", c.record_interval);
    read(r, "run", "p", c.p);
    read(r, "run", "seed", c.seed);
    read(r, "run", "snapshot_times", c.snapshot_times);
    read(r, "run", "output_dir", c.output_dir);
  }
  const YAML::Node tol = root["tolerances"];
  reject_unknown(tol, "tolerances", {"decay_band"});
  if (tol) read(tol, "tolerances", "decay_band", c.decay_band);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string dump_config(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap << YAML::Key << "half_length" << YAML::Value
      << c.half_length << YAML::Key << "num_points" << YAML::Value << c.num_points << YAML::EndMap;
  out << YAML::Key << "soliton" << YAML::Value << YAML::BeginMap << YAML::Key << "c_star" << YAML::Value << c.c_star
      << YAML::Key << "xi_star" << YAML::Value << c.xi_star << YAML::EndMap;
  out << YAML::Key << "forcing" << YAML::Value << YAML::BeginMap << YAML::Key << "epsilon" << YAML::Value
      << c.epsilon << YAML::Key << "energy" << YAML::Value << c.energy << YAML::Key << "profile" << YAML::Value
      << c.profile << YAML::Key << "scale" << YAML::Value << c.profile_scale;
  if (!c.profile_table.empty()) out << YAML::Key << "table" << YAML::Value << c.profile_table;
  out << YAML::EndMap;
  static const char* kinds[] = {"none", "odd", "even", "random", "file"};
  out << YAML::Key << "perturbation" << YAML::Value << YAML::BeginMap << YAML::Key << "kind" << YAML::Value
      << kinds[static_cast<int>(c.perturbation.kind)] << YAML::Key << "h1w_norm" << YAML::Value
      << c.perturbation.h1w_norm;
  if (!c.perturbation.file.empty()) out << YAML::Key << "file" << YAML::Value << c.perturbation.file;
  out << YAML::EndMap;
  const WeightSchedule s = c.schedule();
  out << YAML::Key << "weights" << YAML::Value << YAML::BeginMap << YAML::Key << "w" << YAML::Value << c.w
      << YAML::Key << "w_min" << YAML::Value << s.w_min << YAML::Key << "w_inf" << YAML::Value << s.w_inf
      << YAML::EndMap;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap << YAML::Key << "dt" << YAML::Value << c.dt
      << YAML::Key << "scheme" << YAML::Value << c.scheme << YAML::Key << "dealias" << YAML::Value << c.dealias
      << YAML::Key << "sponge_strength" << YAML::Value << c.sponge_strength << YAML::Key << "sponge_width"
      << YAML::Value << c.sponge_width << YAML::Key << "comoving" << YAML::Value << c.comoving << YAML::EndMap;
  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  if (c.horizon) out << YAML::Key << "horizon" << YAML::Value << *c.horizon;
  out << YAML::Key << "gamma_horizon" << YAML::Value << c.gamma_horizon << YAML::Key << "record_interval"
      << YAML::Value << c.record_interval << YAML::Key << "p" << YAML::Value << c.p << YAML::Key << "seed"
      << YAML::Value << c.seed << YAML::Key << "snapshot_times" << YAML::Value << YAML::Flow << c.snapshot_times;
  if (!c.output_dir.empty()) out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  out << YAML::EndMap;
  out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap << YAML::Key << "decay_band" << YAML::Value
      << c.decay_band << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace fkdv
