#include "fkdv/harness.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "fkdv/checkpoint.hpp"
#include "fkdv/kernels.hpp"
#include "fkdv/modulation.hpp"
#include "fkdv/norms.hpp"
#include "fkdv/soliton.hpp"
#include "fkdv/spectral.hpp"

namespace fkdv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const int kSchemaVersion = 1;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Field scaled_shape(const GridSpec& g, const RunConfig& cfg) {
  const auto& pert = cfg.perturbation;
  Field shape(g);
  switch (pert.kind) {
    case PerturbationKind::none:
      return shape;
    case PerturbationKind::odd:
      shape = Field::sample(g, [](double x) { return x * std::exp(-0.25 * x * x); });
      break;
    case PerturbationKind::even:
      shape = Field::sample(g, [](double x) { return (1.0 - 0.5 * x * x) * std::exp(-0.25 * x * x); });
      break;
    case PerturbationKind::random: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> centre(-8.0, 8.0), width(0.7, 2.0);
      std::normal_distribution<double> amp(0.0, 1.0);
      for (int k = 0; k < 6; ++k) {
        const double x0 = centre(rng), s = width(rng), a = amp(rng);
        shape += Field::sample(g, [&](double x) { return a * std::exp(-0.5 * (x - x0) * (x - x0) / (s * s)); });
      }
      break;
    }
    case PerturbationKind::file: {
      Snapshot snap = read_snapshot(pert.file);
      if (!(snap.field.grid() == g))
        throw ConfigError("perturbation.file", "grid of '" + pert.file + "' does not match the run grid");
      return snap.field;
    }
  }
  const double norm = weighted_h1(shape, cfg.w);
  shape *= pert.h1w_norm / norm;
  return shape;
}

}  // namespace

Field initial_perturbation(const RunConfig& cfg) {
  const GridSpec g = cfg.grid();
  Field v = scaled_shape(g, cfg);
  if (cfg.xi_star != 0.0) v = translate(v, cfg.xi_star);
  return v;
}

Field initial_field(const RunConfig& cfg) {
  const GridSpec g = cfg.grid();
  return sample_phi_at({cfg.c_star, cfg.xi_star}, g) + initial_perturbation(cfg);
}

TheoremReport theorem_suite(const ModulationTrack& track, const RunConfig& cfg) {
  if (track.rows.size() < 5) throw std::invalid_argument("theorem suite: need at least five records");
  TheoremReport r;
  const ForcingSpec& forcing = track.forcing;
  const double eps = forcing.epsilon;
  r.gamma = forcing.gamma();
  r.horizon = track.rows.back().t;
  r.decay_band = cfg.decay_band;
  if (!(r.gamma * r.horizon >= 3.0))
    throw std::invalid_argument("theorem suite: insufficient horizon for the rate fit (gamma T = " +
                                format_double(r.gamma * r.horizon) + " < 3)");

  r.decay_fit_start = 2.0 / r.gamma;
  std::vector<double> ft, fy;
  for (const auto& row : track.rows) {
    if (row.t >= r.decay_fit_start && row.h1w_vbar_winf > 0.0) {
      ft.push_back(row.t);
      fy.push_back(std::log(row.h1w_vbar_winf));
    }
  }
  r.decay_fit_points = ft.size();
  r.decay_rate = ft.size() >= 2 ? -least_squares(ft, fy).slope : std::numeric_limits<double>::quiet_NaN();

  const ApproximationGap gap = approximation_gap(track);
  r.sup_speed_gap = gap.sup_speed;
  r.sup_position_gap = gap.sup_position;
  r.sup_log_alpha_gap = gap.sup_log_alpha;
  r.sup_omega_gap = gap.sup_omega;
  r.max_ode_mismatch = gap.max_ode_mismatch;

  std::vector<double> times, alphas;
  std::vector<InvariantSample> inv;
  double alpha_max = 0.0;
  for (const auto& row : track.rows) {
    r.sup_h1_vbar = std::max(r.sup_h1_vbar, row.h1_vbar);
    r.sup_h1_v = std::max(r.sup_h1_v, row.h1_v);
    r.max_residual = std::max(r.max_residual, row.residual);
    r.max_j_mismatch = std::max(r.max_j_mismatch, std::abs(row.J - row.J_alt));
    if (row.residual < 1e-10) r.max_pythagoras_defect = std::max(r.max_pythagoras_defect, row.pythagoras_defect);
    times.push_back(row.t);
    alphas.push_back(row.alpha);
    inv.push_back(row.invariants);
    alpha_max = std::max(alpha_max, row.alpha);
  }
  r.identities = identity_monitor(times, inv, forcing);

  r.speed_ratio_final = track.rows.back().c / track.c0;
  r.speed_ratio_predicted = predicted_speed(forcing, track.c0, r.horizon) / track.c0;
  const auto half = std::min_element(track.rows.begin(), track.rows.end(), [&](const TrackRow& a, const TrackRow& b) {
    return std::abs(a.t - 0.5 * r.horizon) < std::abs(b.t - 0.5 * r.horizon);
  });
  r.speed_settling = std::abs(track.rows.back().c - half->c);

  r.delta = std::pow(eps, -cfg.p);
  r.midpoint_margin = midpoint_margin(track.schedule, times, alphas, r.delta);
  r.q_ratio_times = {1.0, 10.0, 100.0};
  for (double t : r.q_ratio_times) r.q_ratios.push_back(q_bound_ratio(track.schedule, t, r.delta));

  const double wm = track.schedule.w_min;
  r.c3_window_ratio = r.delta * r.gamma;
  r.c3_rate_ratio = r.gamma / (std::pow(alpha_max, -3.0) * wm * (track.c0 - wm * wm) / 3.0);
  r.c3_smallness = (std::pow(eps, cfg.p) + std::pow(eps, 1.0 - 4.0 * cfg.p)) * forcing.energy;
  r.k_final = track.rows.back().K_diag;

  const double qmax = *std::max_element(r.q_ratios.begin(), r.q_ratios.end());
  const double qmin = *std::min_element(r.q_ratios.begin(), r.q_ratios.end());
  r.flags["decay_rate_in_band"] =
      r.decay_rate >= (1.0 - cfg.decay_band) * r.gamma && r.decay_rate <= (1.0 + cfg.decay_band) * r.gamma;
  r.flags["sup_h1_finite"] = std::isfinite(r.sup_h1_vbar) && std::isfinite(r.sup_h1_v);
  r.flags["speed_ratio_matches_prediction"] = std::abs(r.speed_ratio_final - r.speed_ratio_predicted) <= 10.0 * eps;
  r.flags["midpoint_condition"] = r.midpoint_margin >= 0.0;
  r.flags["q_ratio_stable"] = qmax <= 2.0 * qmin;
  r.flags["orthogonality"] = r.max_residual < 1e-9;
  r.flags["energy_two_ways"] = r.max_j_mismatch < 1e-9;
  r.flags["pythagoras"] = r.max_pythagoras_defect < 1e-9;
  return r;
}

RunResult run_experiment(const RunConfig& cfg, bool store_fields) {
  cfg.validate();
  RunResult out;
  out.config = cfg;
  const Field u0 = initial_field(cfg);
  const ForcingSpec forcing = cfg.forcing();
  const double T = cfg.horizon_time();

  CoevolveOptions opt;
  opt.record_interval = cfg.record_interval;
  opt.comoving = cfg.comoving;
  opt.schedule = cfg.schedule();
  opt.w_inf = opt.schedule.w_inf;
  opt.store_fields = store_fields;
  std::vector<double> pending = cfg.snapshot_times;
  std::sort(pending.begin(), pending.end());
  opt.on_record = [&](const TrackRow& row, const Decomposition& d) {
    while (!pending.empty() && pending.front() <= row.t + 0.5 * cfg.record_interval) {
      out.snapshots.push_back({row.t, d.centered});
      pending.erase(pending.begin());
    }
  };
  out.track = coevolve(u0, T, forcing, cfg.solver(), opt);
  const std::vector<double> k = k_diagnostic(out.track, cfg.p);
  for (std::size_t i = 0; i < k.size(); ++i) out.track.rows[i].K_diag = k[i];
  try {
    out.report = theorem_suite(out.track, cfg);
  } catch (const std::invalid_argument& e) {
    out.report_error = e.what();
  }
  return out;
}

namespace {

struct Column {
  const char* name;
  double (*get)(const TrackRow&);
  void (*set)(TrackRow&, double);
};

#define FKDV_COL(label, expr)                                  \
  Column {                                                     \
    label, [](const TrackRow& r) { return double(r.expr); },   \
        [](TrackRow& r, double v) { r.expr = decltype(r.expr)(v); } \
  }

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      FKDV_COL("t", t),
      FKDV_COL("c", c),
      FKDV_COL("xi", xi),
      FKDV_COL("alpha", alpha),
      FKDV_COL("Omega", omega),
      FKDV_COL("c_ap", c_ap),
      FKDV_COL("xi_ap", xi_ap),
      FKDV_COL("N", invariants.mass_sq),
      FKDV_COL("H", invariants.hamiltonian),
      FKDV_COL("E2", invariants.e2),
      FKDV_COL("J", J),
      FKDV_COL("l2_vbar", l2_vbar),
      FKDV_COL("h1_vbar", h1_vbar),
      FKDV_COL("h1w_vbar_winf", h1w_vbar_winf),
      FKDV_COL("h1w_v_schedule", h1w_v_schedule),
      FKDV_COL("K_diag", K_diag),
      FKDV_COL("c_ode", c_ode),
      FKDV_COL("xi_ode", xi_ode),
      FKDV_COL("int_speed", int_speed),
      FKDV_COL("int_correction", int_correction),
      FKDV_COL("J_alt", J_alt),
      FKDV_COL("pythagoras_defect", pythagoras_defect),
      FKDV_COL("h1_v", h1_v),
      FKDV_COL("w_minus", w_minus),
      FKDV_COL("w_plus", w_plus),
      FKDV_COL("residual", residual),
      FKDV_COL("newton_iterations", newton_iterations),
      FKDV_COL("gradient_sq", invariants.gradient_sq),
      FKDV_COL("u_ux2", invariants.u_ux2),
      FKDV_COL("quartic", invariants.quartic),
      FKDV_COL("mass", invariants.mass),
  };
  return cols;
}

#undef FKDV_COL

}  // namespace

const std::vector<std::string>& track_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : columns()) n.emplace_back(c.name);
    return n;
  }();
  return names;
}

void write_track_csv(const ModulationTrack& track, const fs::path& path) {
  auto out = open_for_write(path);
  const auto& cols = columns();
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j].name;
  out << "\n";
  for (const auto& row : track.rows) {
    for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << format_double(cols[j].get(row));
    out << "\n";
  }
  finish_write(out, path);
}

ModulationTrack read_track_csv(const fs::path& path, const RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  std::vector<int> index;
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) {
      int found = -1;
      for (std::size_t j = 0; j < columns().size(); ++j)
        if (name == columns()[j].name) found = static_cast<int>(j);
      index.push_back(found);
    }
  }
  ModulationTrack track;
  track.grid = cfg.grid();
  track.forcing = cfg.forcing();
  track.schedule = cfg.schedule();
  track.w_inf = track.schedule.w_inf;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    TrackRow row;
    std::size_t j = 0;
    while (std::getline(ss, cell, ',')) {
      if (j >= index.size()) throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": extra cells");
      if (index[j] >= 0) columns()[index[j]].set(row, parse_double(cell, path, lineno));
      ++j;
    }
    track.rows.push_back(row);
  }
  if (track.rows.empty()) throw std::runtime_error(path.string() + ": no rows");
  track.c0 = track.rows.front().c;
  track.xi0 = track.rows.front().xi;
  return track;
}

namespace {

json flags_json(const std::map<std::string, bool>& flags) {
  json j = json::object();
  for (const auto& [k, v] : flags) j[k] = v;
  return j;
}

json identities_json(const IdentityReport& id) {
  return {{"mass_sq_law", id.mass_sq_law},
          {"momentum_law", id.momentum_law},
          {"hamiltonian_identity", id.hamiltonian_identity},
          {"e2_identity", id.e2_identity},
          {"mass_sq_drift", id.mass_sq_drift},
          {"hamiltonian_drift", id.hamiltonian_drift}};
}

json theorem_json(const TheoremReport& r) {
  json j;
  j["gamma"] = r.gamma;
  j["horizon"] = r.horizon;
  j["decay"] = {{"rate", r.decay_rate},
                {"rate_over_gamma", r.decay_rate / r.gamma},
                {"fit_start", r.decay_fit_start},
                {"fit_points", r.decay_fit_points},
                {"band", r.decay_band}};
  j["sup"] = {{"h1_vbar", r.sup_h1_vbar},
              {"h1_v", r.sup_h1_v},
              {"speed_gap", r.sup_speed_gap},
              {"position_gap", r.sup_position_gap},
              {"log_alpha_gap", r.sup_log_alpha_gap},
              {"omega_gap", r.sup_omega_gap},
              {"ode_mismatch", r.max_ode_mismatch},
              {"residual", r.max_residual},
              {"J_mismatch", r.max_j_mismatch},
              {"pythagoras_defect", r.max_pythagoras_defect}};
  j["speed_ratio"] = {{"final", r.speed_ratio_final},
                      {"predicted", r.speed_ratio_predicted},
                      {"settling", r.speed_settling}};
  j["identities"] = identities_json(r.identities);
  j["weights"] = {{"delta", r.delta},
                  {"midpoint_margin", r.midpoint_margin},
                  {"q_ratio_times", r.q_ratio_times},
                  {"q_ratios", r.q_ratios}};
  j["feasibility"] = {{"delta_gamma", r.c3_window_ratio},
                      {"rate_ratio", r.c3_rate_ratio},
                      {"smallness", r.c3_smallness},
                      {"K_final", r.k_final}};
  j["flags"] = flags_json(r.flags);
  return j;
}

}  // namespace

std::string report_json(const TheoremReport& r, const RunConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = dump_config(cfg);
  j["config_source"] = cfg.source;
  j["results"] = theorem_json(r);
  bool all = true;
  for (const auto& [k, v] : r.flags) all = all && v;
  j["pass"] = all;
  return j.dump(2) + "\n";
}

void persist(const RunResult& result, const fs::path& dir) {
  fs::create_directories(dir);
  write_track_csv(result.track, dir / "track.csv");
  {
    const fs::path p = dir / "report.json";
    auto out = open_for_write(p);
    if (result.report_error.empty()) {
      out << report_json(result.report, result.config);
    } else {
      json j = {{"schema_version", kSchemaVersion},
                {"config", dump_config(result.config)},
                {"config_source", result.config.source},
                {"error", result.report_error},
                {"pass", false}};
      out << j.dump(2) << "\n";
    }
    finish_write(out, p);
  }
  {
    const fs::path p = dir / "config.yaml";
    auto out = open_for_write(p);
    out << dump_config(result.config);
    finish_write(out, p);
  }
  if (!result.snapshots.empty()) {
    fs::create_directories(dir / "snapshots");
    const ForcingSpec forcing = result.config.forcing();
    for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%04zu", i);
      write_snapshot(dir / "snapshots" / name, result.snapshots[i].field, result.snapshots[i].t, forcing);
    }
  }
}

fs::path output_root(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("FKDV_OUTPUT_ROOT"); env && *env) return env;
  return "runs";
}

SweepResult sweep(const RunConfig& base, const std::vector<double>& epsilons, const std::vector<double>& ps,
                  unsigned workers, const fs::path& out_dir) {
  SweepResult res;
  const std::vector<double> pvals = ps.empty() ? std::vector<double>{base.p} : ps;
  for (double p : pvals)
    for (double e : epsilons) res.points.push_back({e, p, {}, {}});

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < res.points.size(); i = next++) {
      SweepPoint& pt = res.points[i];
      try {
        RunConfig cfg = base;
        cfg.epsilon = pt.epsilon;
        cfg.p = pt.p;
        RunResult run = run_experiment(cfg);
        if (!run.report_error.empty()) throw std::runtime_error(run.report_error);
        pt.report = run.report;
        if (!out_dir.empty()) {
          char name[64];
          std::snprintf(name, sizeof name, "eps_%.6g_p_%.3g", pt.epsilon, pt.p);
          persist(run, out_dir / name);
        }
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(res.points.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < workers; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (double p : pvals) {
    std::vector<double> le, ls, lx, lh;
    for (const auto& pt : res.points) {
      if (pt.p != p || !pt.error.empty()) continue;
      if (!(pt.report.sup_speed_gap > 0.0 && pt.report.sup_position_gap > 0.0 && pt.report.sup_h1_vbar > 0.0))
        continue;
      le.push_back(std::log(pt.epsilon));
      ls.push_back(std::log(pt.report.sup_speed_gap));
      lx.push_back(std::log(pt.report.sup_position_gap));
      lh.push_back(std::log(pt.report.sup_h1_vbar));
    }
    if (le.size() >= 2) {
      res.speed_gap_slope[p] = least_squares(le, ls).slope;
      res.position_gap_slope[p] = least_squares(le, lx).slope;
      res.h1_slope[p] = least_squares(le, lh).slope;
    }
  }
  return res;
}

std::string sweep_json(const SweepResult& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["points"] = json::array();
  for (const auto& pt : s.points) {
    json e = {{"epsilon", pt.epsilon}, {"p", pt.p}};
    if (pt.error.empty())
      e["results"] = theorem_json(pt.report);
    else
      e["error"] = pt.error;
    j["points"].push_back(e);
  }
  json slopes = json::array();
  for (const auto& [p, v] : s.speed_gap_slope) {
    slopes.push_back({{"p", p},
                      {"speed_gap", v},
                      {"position_gap", s.position_gap_slope.at(p)},
                      {"sup_h1_vbar", s.h1_slope.at(p)},
                      {"sup_h1_reference", 1.0 - 4.0 * p}});
  }
  j["slopes"] = slopes;
  return j.dump(2) + "\n";
}

LinearSuiteOptions default_linear_options() {
  LinearSuiteOptions o;
  for (int i = 0; i <= 12; ++i) o.decay_times.push_back(10.0 + 2.5 * i);
  for (int i = 0; i <= 8; ++i) o.smoothing_times.push_back(1e-3 * std::pow(10.0, 2.0 * i / 8.0));
  return o;
}

LinearSuiteReport linear_suite(const LinearSuiteOptions& opt) {
  LinearSuiteReport r;
  r.options = opt;
  const GridSpec g = make_grid(opt.half_length, opt.num_points);

  const OperatorMatrix plain = assemble_operator(opt.c, g);
  const SolitonTables tab = sample_profiles(opt.c, g);
  const Eigen::Map<const Eigen::VectorXd> dx(tab.dphi_dx.data().data(), g.num_points);
  const Eigen::Map<const Eigen::VectorXd> dc(tab.dphi_dc.data().data(), g.num_points);
  r.kernel_residual = (plain.matrix * dx).cwiseAbs().maxCoeff();
  r.jordan_residual = (plain.matrix * dc - dx).cwiseAbs().maxCoeff();
  r.jordan_residual_flipped = (plain.matrix * dc + dx).cwiseAbs().maxCoeff();

  const OperatorMatrix conj = assemble_conjugated(opt.c, g, WeightPair::symmetric(opt.w), opt.transition_width);
  r.essential_edge = conj.essential_edge();
  const SpectrumReport spec = compute_spectrum(conj);
  r.near_zero = static_cast<std::size_t>(spec.near_zero);
  r.kernel_radius = spec.kernel_radius;
  r.rightmost_nonkernel = spec.rightmost_nonkernel_real;
  r.eigenvalues = spec.eigenvalues;
  r.decay_norms = semigroup_norms(conj, opt.decay_times, 0);
  r.decay = fit_decay(opt.decay_times, r.decay_norms);
  if (opt.smoothing_half_length == opt.half_length) {
    r.smoothing_norms = semigroup_norms(conj, opt.smoothing_times, 1);
  } else {
    const GridSpec gs = make_grid(opt.smoothing_half_length, opt.num_points);
    const OperatorMatrix short_box = assemble_conjugated(opt.c, gs, WeightPair::symmetric(opt.w), opt.transition_width);
    r.smoothing_norms = semigroup_norms(short_box, opt.smoothing_times, 1);
  }
  r.smoothing_slope = fit_loglog_slope(opt.smoothing_times, r.smoothing_norms);

  const double rate = opt.w * (opt.c - opt.w * opt.w);
  r.flags["kernel_relation"] = r.kernel_residual < 1e-8;
  r.flags["jordan_relation"] = r.jordan_residual < 1e-8;
  r.flags["jordan_relation_flipped_sign"] = r.jordan_residual_flipped < 1e-8;
  r.flags["double_zero"] = r.near_zero == 2;
  r.flags["spectral_gap"] = r.rightmost_nonkernel <= r.essential_edge + 0.05;
  r.flags["semigroup_rate"] = r.decay.beta >= 0.9 * rate;
  r.flags["smoothing_slope"] = std::abs(r.smoothing_slope + 0.5) <= 0.1;

  if (opt.asymmetric) {
    const WeightPair wp{opt.w_minus, opt.w_plus};
    const OperatorMatrix asym = assemble_conjugated(opt.c, g, wp, opt.transition_width);
    r.asym_bound = std::min(wp.minus * (opt.c - wp.minus * wp.minus), wp.plus * (opt.c - wp.plus * wp.plus));
    const SpectrumReport as = compute_spectrum(asym);
    r.asym_near_zero = static_cast<std::size_t>(as.near_zero);
    r.asym_rightmost_nonkernel = as.rightmost_nonkernel_real;
    r.asym_rate = fit_decay(opt.decay_times, semigroup_norms(asym, opt.decay_times, 0)).beta;
    r.flags["asymmetric_double_zero"] = r.asym_near_zero == 2;
    r.flags["asymmetric_rate"] = r.asym_rate >= 0.9 * r.asym_bound && r.asym_rate <= 1.1 * r.asym_bound;
  }
  return r;
}

std::string linear_json(const LinearSuiteReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  const auto& o = r.options;
  j["options"] = {{"c", o.c},
                  {"w", o.w},
                  {"w_minus", o.w_minus},
                  {"w_plus", o.w_plus},
                  {"half_length", o.half_length},
                  {"smoothing_half_length", o.smoothing_half_length},
                  {"num_points", o.num_points},
                  {"transition_width", o.transition_width}};
  j["kernel_residual"] = r.kernel_residual;
  j["jordan_residual"] = r.jordan_residual;
  j["jordan_residual_flipped"] = r.jordan_residual_flipped;
  j["essential_edge"] = r.essential_edge;
  j["near_zero"] = r.near_zero;
  j["kernel_radius"] = r.kernel_radius;
  j["rightmost_nonkernel"] = r.rightmost_nonkernel;
  j["decay"] = {{"times", o.decay_times}, {"norms", r.decay_norms}, {"M", r.decay.M}, {"beta", r.decay.beta}};
  j["smoothing"] = {{"times", o.smoothing_times}, {"norms", r.smoothing_norms}, {"slope", r.smoothing_slope}};
  if (o.asymmetric)
    j["asymmetric"] = {{"bound", r.asym_bound},
                       {"rate", r.asym_rate},
                       {"near_zero", r.asym_near_zero},
                       {"rightmost_nonkernel", r.asym_rightmost_nonkernel}};
  j["flags"] = flags_json(r.flags);
  return j.dump(2) + "\n";
}

std::vector<PredictionRow> predict_table(const ForcingSpec& forcing, double c0, double xi0,
                                         const std::vector<double>& times) {
  std::vector<PredictionRow> rows;
  for (double t : times) {
    PredictionRow row;
    row.t = t;
    row.c_ap = predicted_speed(forcing, c0, t);
    row.xi_ap = std::isinf(t) ? std::numeric_limits<double>::infinity() : predicted_position(forcing, c0, xi0, t);
    rows.push_back(row);
  }
  return rows;
}

std::vector<CheckResult> property_suite() {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), std::isfinite(value) && value <= tol, value, tol});
  };

  const GridSpec g = make_grid(40.0, 512);
  for (double c : {0.5, 1.0, 2.0}) {
    const Field phi = sample_phi(c, g);
    const InvariantSample inv = compute_invariants(phi);
    const SolitonInvariants ref = soliton_invariants(c);
    check("soliton mass c=" + format_double(c), std::abs(inv.mass_sq - ref.mass_sq) / ref.mass_sq, 1e-11);
    check("soliton hamiltonian c=" + format_double(c),
          std::abs(inv.hamiltonian - ref.hamiltonian) / std::abs(ref.hamiltonian), 1e-11);
  }

  {
    const double c = 1.3;
    const DualBasis b = dual_basis(c, g);
    const double g11 = inner_product(b.dphi_dx, b.first), g12 = inner_product(b.dphi_dc, b.first);
    const double g21 = inner_product(b.dphi_dx, b.second), g22 = inner_product(b.dphi_dc, b.second);
    check("dual basis biorthogonality",
          std::max({std::abs(g11 - 1.0), std::abs(g12), std::abs(g21), std::abs(g22 - 1.0)}), 1e-10);
    const Field gfun = Field::sample(g, [](double x) { return std::exp(-0.3 * (x - 1.0) * (x - 1.0)) * (1.0 + x); });
    const Projection p1 = project(gfun, b);
    const Projection p2 = project(p1.parallel, b);
    check("projection idempotent", (p2.parallel - p1.parallel).max_abs(), 1e-10);
  }

  for (double c0 : {1.0, 4.0}) {
    const Field zero(g);
    const Eigen::Matrix2d K = modulation_matrix(zero, c0);
    const double err = std::max({std::abs(K(0, 0) - 9.0 * std::pow(c0, 1.5)), std::abs(K(0, 1)),
                                 std::abs(K(1, 0) - 9.0), std::abs(K(1, 1) + 4.5 * std::sqrt(c0))});
    check("K(0) from its definition c0=" + format_double(c0), err, 1e-10);
    ForcingSpec f{0.01, 0.75 * std::log(2.0), ForcingProfile::exp_decay()};
    const ModulationRates rates = modulation_rates(0.0, zero, 1.0, c0, f);
    const double s = -f.amplitude(0.0);
    check("v=0 rates c0=" + format_double(c0),
          std::max(std::abs(rates.alpha_t / s - 2.0 / 3.0), std::abs(rates.omega_t / s + 2.0 / 3.0 / std::sqrt(c0))),
          1e-10);
  }

  {
    const Field u = sample_phi_at({1.7, 3.2}, g);
    const Decomposition d = extract(u, {1.6, 3.0});
    check("extraction fixed point", std::max(std::abs(d.c - 1.7), std::abs(d.xi - 3.2)), 1e-10);
  }

  {
    ForcingSpec f{0.01, 0.75 * std::log(2.0), ForcingProfile::exp_decay()};
    check("doubling prediction", std::abs(predicted_speed(f, 1.0, std::numeric_limits<double>::infinity()) - 2.0),
          1e-14);
    const WeightSchedule s = default_schedule(0.25, f.energy, f.gamma());
    double worst = 0.0, prev_m = -1.0, prev_p = 1e9;
    for (int i = 0; i <= 200; ++i) {
      const WeightPair w = s.at(i * 5.0);
      if (w.minus < prev_m || w.plus > prev_p) worst = 1.0;
      prev_m = w.minus;
      prev_p = w.plus;
    }
    check("weight schedule monotone", worst, 0.0);
    const WeightPair far = s.at(1e6);
    check("weight schedule limits", std::max(std::abs(far.minus - s.w_inf), std::abs(far.plus - s.w_inf)), 1e-12);
  }

  {
    const GridSpec gt = make_grid(50.0, 1024);
    SolverConfig sc;
    sc.dt = 1e-3;
    sc.record_every = 100;
    const Field u0 = sample_phi(1.0, gt);
    const Trajectory tr = simulate(u0, 1.0, ForcingSpec{}, sc);
    const Field exact = sample_phi_at({1.0, 1.0}, gt);
    check("unforced transport T=1", l2_norm(tr.snapshots.back() - exact) / std::sqrt(6.0), 1e-8);
  }

  {
    const Field vbar = Field::sample(g, [](double x) { return 1e-3 * x * std::exp(-0.3 * x * x); });
    for (double alpha : {0.8, 1.25}) {
      const Field v = dilate(vbar, alpha);
      const double b = 0.2;
      const double lhs = weighted_l2(v, alpha * b), rhs = std::pow(alpha, 1.5) * weighted_l2(vbar, b);
      check("scaling identity alpha=" + format_double(alpha), std::abs(lhs - rhs) / rhs, 1e-8);
    }
  }

  {
    std::vector<double> f(g.num_points), h(g.num_points);
    for (std::size_t i = 0; i < g.num_points; ++i) {
      f[i] = std::exp(-0.01 * g.x(i) * g.x(i));
      h[i] = std::cos(g.x(i));
    }
    const double par = kernels::weighted_dot(g, f, h, 0.2, 0.3);
    const double ref = kernels::reference::weighted_dot(g, f, h, 0.2, 0.3);
    check("parallel kernel matches reference", std::abs(par - ref) / std::abs(ref), 1e-12);
  }
  return out;
}

}  // namespace fkdv
