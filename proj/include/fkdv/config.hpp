#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkdv/forcing.hpp"
#include "fkdv/grid.hpp"
#include "fkdv/solver.hpp"
#include "fkdv/weights.hpp"

namespace fkdv {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message, int line = -1);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

enum class PerturbationKind { none, odd, even, random, file };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::none;
  // Target ||vbar_*||_{H^1_w} for the scaled shapes (w = weights.w).
  double h1w_norm = 1e-3;
  std::string file;  // snapshot base path for kind == file
};

struct RunConfig {
  std::string source;  // file the configuration came from, if any
  double half_length = 50.0;
  std::size_t num_points = 1024;
  double c_star = 1.0;
  double xi_star = 0.0;
  double epsilon = 0.01;
  double energy = 0.75 * 0.6931471805599453;
  std::string profile = "exp_decay";
  double profile_scale = 1.0;
  std::string profile_table;  // CSV "tau,f" for the tabulated profile
  PerturbationSpec perturbation;
  double w = 0.25;
  std::optional<double> w_min;
  std::optional<double> w_inf;
  double p = 0.2;
  // Horizon: either explicit or as a multiple of 1/gamma.
  std::optional<double> horizon;
  double gamma_horizon = 8.0;
  double record_interval = 0.5;
  double dt = 0.01;
  std::string scheme = "etdrk4";
  bool dealias = true;
  double sponge_strength = 100.0;
  double sponge_width = 0.2;
  bool comoving = true;
  std::uint64_t seed = 12345;
  std::vector<double> snapshot_times;
  std::string output_dir;
  double decay_band = 0.2;

  GridSpec grid() const;
  ForcingSpec forcing() const;
  SolverConfig solver() const;
  WeightSchedule schedule() const;
  double horizon_time() const;
  // Throws ConfigError naming the offending field.
  void validate() const;
};

RunConfig parse_config(const std::string& yaml_text, const std::string& source = "<string>");
RunConfig load_config(const std::filesystem::path& path);
// Plain YAML rendering of every field (echoed next to results).
std::string dump_config(const RunConfig& cfg);

}  // namespace fkdv
