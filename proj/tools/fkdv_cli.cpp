#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include "fkdv/harness.hpp"
#include "fkdv/modulation.hpp"

namespace fs = std::filesystem;
using namespace fkdv;

namespace {

enum ExitCode { kOk = 0, kError = 1, kCheckFailed = 2, kBadConfig = 3 };

bool all_pass(const std::map<std::string, bool>& flags) {
  for (const auto& [k, v] : flags)
    if (!v) return false;
  return true;
}

void print_flags(const std::map<std::string, bool>& flags) {
  for (const auto& [k, v] : flags) std::printf("  %-34s %s\n", k.c_str(), v ? "pass" : "FAIL");
}

fs::path run_dir(const std::string& out, const RunConfig& cfg, const std::string& fallback) {
  if (!out.empty()) return out;
  const fs::path root = output_root(cfg.output_dir);
  const std::string stem = cfg.source.empty() ? fallback : fs::path(cfg.source).stem().string();
  return root / stem;
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path().empty() ? fs::path(".") : p.parent_path());
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_simulate(const std::string& config, const std::string& out, bool fields) {
  const RunConfig cfg = load_config(config);
  const RunResult res = run_experiment(cfg, fields);
  const fs::path dir = run_dir(out, cfg, "simulate");
  persist(res, dir);
  if (!res.report_error.empty()) {
    std::printf("records %zu, no theorem report: %s\nwrote %s\n", res.track.rows.size(), res.report_error.c_str(),
                dir.string().c_str());
    return kCheckFailed;
  }
  const TheoremReport& r = res.report;
  std::printf("records %zu  T = %.6g  gamma = %.6g\n", res.track.rows.size(), r.horizon, r.gamma);
  std::printf("c(T)/c(0) = %.10f  predicted %.10f\n", r.speed_ratio_final, r.speed_ratio_predicted);
  std::printf("decay rate / gamma = %.4f  (fit from t = %.4g, %zu points)\n", r.decay_rate / r.gamma,
              r.decay_fit_start, r.decay_fit_points);
  std::printf("sup |c - c_ap| = %.3e  sup |xi - xi_ap| = %.3e  sup |vbar|_H1 = %.3e\n", r.sup_speed_gap,
              r.sup_position_gap, r.sup_h1_vbar);
  std::printf("midpoint margin = %.3e  max ODE mismatch = %.3e\n", r.midpoint_margin, r.max_ode_mismatch);
  print_flags(r.flags);
  std::printf("wrote %s\n", dir.string().c_str());
  return all_pass(r.flags) ? kOk : kCheckFailed;
}

int cmd_sweep(const std::string& config, const std::vector<double>& eps, const std::vector<double>& ps,
              unsigned workers, const std::string& out) {
  const RunConfig cfg = load_config(config);
  const fs::path dir = run_dir(out, cfg, "sweep");
  const SweepResult s = sweep(cfg, eps, ps, workers, dir);
  write_text(dir / "sweep.json", sweep_json(s));
  std::printf("%-12s %-6s %-12s %-12s %-12s\n", "epsilon", "p", "sup|c-c_ap|", "sup|xi-xi_ap|", "sup|vbar|H1");
  bool ok = true;
  for (const auto& pt : s.points) {
    if (!pt.error.empty()) {
      std::printf("%-12.4g %-6.3g error: %s\n", pt.epsilon, pt.p, pt.error.c_str());
      ok = false;
      continue;
    }
    std::printf("%-12.4g %-6.3g %-12.4e %-12.4e %-12.4e\n", pt.epsilon, pt.p, pt.report.sup_speed_gap,
                pt.report.sup_position_gap, pt.report.sup_h1_vbar);
  }
  for (const auto& [p, slope] : s.speed_gap_slope)
    std::printf("p = %.3g: slopes speed %.3f  position %.3f  H1 %.3f (reference %.3f)\n", p, slope,
                s.position_gap_slope.at(p), s.h1_slope.at(p), 1.0 - 4.0 * p);
  std::printf("wrote %s\n", (dir / "sweep.json").string().c_str());
  return ok ? kOk : kCheckFailed;
}

int cmd_verify_linear(LinearSuiteOptions opt, const std::string& out) {
  const LinearSuiteReport r = linear_suite(opt);
  std::printf("kernel residual %.3e  jordan residual %.3e (opposite sign %.3e)\n", r.kernel_residual,
              r.jordan_residual, r.jordan_residual_flipped);
  std::printf("near-zero eigenvalues %zu (radius %.3e)  rightmost other %.6f  edge %.6f\n", r.near_zero,
              r.kernel_radius, r.rightmost_nonkernel, r.essential_edge);
  std::printf("semigroup beta %.5f  (w(c-w^2) = %.5f)  smoothing slope %.4f\n", r.decay.beta,
              -r.essential_edge, r.smoothing_slope);
  if (opt.asymmetric)
    std::printf("asymmetric rate %.5f  bound %.5f\n", r.asym_rate, r.asym_bound);
  print_flags(r.flags);
  if (!out.empty()) {
    fs::create_directories(out);
    write_text(fs::path(out) / "linear.json", linear_json(r));
    std::ofstream csv(fs::path(out) / "spectrum.csv");
    csv << "re,im\n";
    csv.precision(17);
    for (const auto& z : r.eigenvalues) csv << z.real() << "," << z.imag() << "\n";
    std::printf("wrote %s\n", out.c_str());
  }
  return all_pass(r.flags) ? kOk : kCheckFailed;
}

int cmd_predict(const std::string& profile, double energy, double c0, double xi0, double epsilon,
                const std::vector<std::string>& times) {
  ForcingSpec f;
  f.epsilon = epsilon;
  f.energy = energy;
  if (profile == "exp-decay" || profile == "exp_decay")
    f.profile = ForcingProfile::exp_decay();
  else if (profile == "none")
    f.profile = ForcingProfile::none();
  else
    throw std::invalid_argument("--f must be exp-decay or none");
  f.validate();
  std::vector<double> ts;
  for (const auto& s : times) ts.push_back(s == "inf" ? std::numeric_limits<double>::infinity() : std::stod(s));
  std::printf("%-14s %-20s %-20s %-20s\n", "t", "c_ap", "c_ap/c0", "xi_ap");
  for (const auto& row : predict_table(f, c0, xi0, ts))
    std::printf("%-14.6g %-20.15g %-20.15g %-20.15g\n", row.t, row.c_ap, row.c_ap / c0, row.xi_ap);
  return kOk;
}

int cmd_identities(const std::string& config, double T, std::size_t record_every, const std::string& out) {
  RunConfig cfg = load_config(config);
  SolverConfig sc = cfg.solver();
  sc.record_every = record_every;
  sc.store_snapshots = false;
  const ForcingSpec forcing = cfg.forcing();
  const Trajectory tr = simulate(initial_field(cfg), T > 0.0 ? T : cfg.horizon_time(), forcing, sc);
  const IdentityReport id = identity_monitor(tr, forcing);
  std::printf("records %zu\n", tr.times.size());
  std::printf("  mass-squared law        %.3e\n", id.mass_sq_law);
  std::printf("  momentum law            %.3e\n", id.momentum_law);
  std::printf("  hamiltonian identity    %.3e\n", id.hamiltonian_identity);
  std::printf("  E2 identity             %.3e\n", id.e2_identity);
  std::printf("  mass-squared drift      %.3e\n", id.mass_sq_drift);
  std::printf("  hamiltonian drift       %.3e\n", id.hamiltonian_drift);
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream csv(fs::path(out) / "invariants.csv");
    csv << "t,N,H,E2,mass\n";
    csv.precision(17);
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      csv << tr.times[i] << "," << tr.invariants[i].mass_sq << "," << tr.invariants[i].hamiltonian << ","
          << tr.invariants[i].e2 << "," << tr.invariants[i].mass << "\n";
    nlohmann::json j = {{"schema_version", 1},
                        {"mass_sq_law", id.mass_sq_law},
                        {"momentum_law", id.momentum_law},
                        {"hamiltonian_identity", id.hamiltonian_identity},
                        {"e2_identity", id.e2_identity},
                        {"mass_sq_drift", id.mass_sq_drift},
                        {"hamiltonian_drift", id.hamiltonian_drift}};
    write_text(fs::path(out) / "identities.json", j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& c : property_suite()) {
    std::printf("%-44s %s  (%.3e, tol %.1e)\n", c.name.c_str(), c.pass ? "pass" : "FAIL", c.value, c.tolerance);
    ok = ok && c.pass;
  }
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forced KdV soliton experiments"};
  app.require_subcommand(1);

  std::string config, out;
  bool fields = false;
  auto* sim = app.add_subcommand("simulate", "Run one scenario and write track.csv, report.json");
  sim->add_option("--config", config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out, "Output directory");
  sim->add_flag("--keep-fields", fields, "Keep recentred fields in memory (for snapshot debugging)");

  std::vector<double> eps, ps;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* sw = app.add_subcommand("sweep", "Grid over epsilon and p with scaling slopes");
  sw->add_option("--config", config, "Base YAML configuration")->required()->check(CLI::ExistingFile);
  sw->add_option("--epsilons", eps, "Epsilon values")->required()->delimiter(',');
  sw->add_option("--p", ps, "Window exponents")->delimiter(',');
  sw->add_option("--workers", workers, "Concurrent runs");
  sw->add_option("--out", out, "Output directory");

  LinearSuiteOptions lin = default_linear_options();
  bool no_asym = false;
  auto* vl = app.add_subcommand("verify-linear", "Spectrum and semigroup checks for the linearised operator");
  vl->add_option("--c", lin.c, "Soliton speed");
  vl->add_option("--w", lin.w, "Symmetric weight");
  vl->add_option("--w-minus", lin.w_minus, "Left weight of the asymmetric pair");
  vl->add_option("--w-plus", lin.w_plus, "Right weight of the asymmetric pair");
  vl->add_option("--L", lin.half_length, "Half box length for the spectrum and rate fit");
  vl->add_option("--L-smoothing", lin.smoothing_half_length, "Half box length for the smoothing slope");
  vl->add_option("--N", lin.num_points, "Grid points");
  vl->add_flag("--no-asymmetric", no_asym, "Skip the asymmetric pair");
  vl->add_option("--out", out, "Directory for linear.json and spectrum.csv");

  std::string profile = "exp-decay";
  double energy = 0.75 * std::log(2.0), c0 = 1.0, xi0 = 0.0, epsilon = 0.01;
  std::vector<std::string> times{"inf"};
  auto* pr = app.add_subcommand("predict", "Closed-form speed and position predictors");
  pr->add_option("--f", profile, "Forcing profile: exp-decay or none");
  pr->add_option("--E", energy, "Forcing energy");
  pr->add_option("--c0", c0, "Initial speed");
  pr->add_option("--xi0", xi0, "Initial position");
  pr->add_option("--epsilon", epsilon, "Forcing strength (position predictor only)");
  pr->add_option("--t", times, "Times (inf allowed)")->delimiter(',');

  double T = 0.0;
  std::size_t record_every = 100;
  auto* id = app.add_subcommand("identities", "Monitor the evolution identities of the invariants");
  id->add_option("--config", config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  id->add_option("--T", T, "Horizon (default: the configured one)");
  id->add_option("--record-every", record_every, "Steps between records");
  id->add_option("--out", out, "Directory for invariants.csv and identities.json");

  auto* st = app.add_subcommand("selftest", "Fast property suite");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(config, out, fields);
    if (*sw) return cmd_sweep(config, eps, ps, workers, out);
    if (*vl) {
      lin.asymmetric = !no_asym;
      return cmd_verify_linear(lin, out);
    }
    if (*pr) return cmd_predict(profile, energy, c0, xi0, epsilon, times);
    if (*id) return cmd_identities(config, T, record_every, out);
    if (*st) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kOk;
}
