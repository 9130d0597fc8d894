#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fkdv/checkpoint.hpp"
#include "fkdv/config.hpp"
#include "fkdv/harness.hpp"
#include "fkdv/modulation.hpp"
#include "fkdv/norms.hpp"
#include "fkdv/soliton.hpp"
#include "fkdv/spectral.hpp"
#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace fkdv;
using fkdv::testing::rel;

namespace {

// Short forced run that still clears the gamma T >= 3 rate-fit requirement.
RunConfig short_config() {
  RunConfig c;
  c.half_length = 40.0;
  c.num_points = 512;
  c.epsilon = 0.05;
  c.gamma_horizon = 3.2;
  c.dt = 0.02;
  c.perturbation.kind = PerturbationKind::odd;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fkdv_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const RunResult& doubling_run() {
  static const RunResult r = run_experiment(RunConfig{}, false);
  return r;
}

}  // namespace

TEST_CASE("config parsing") {
  const std::string text =
      "grid:\n  half_length: 40\n  num_points: 512\nforcing:\n  epsilon: 0.02\n  energy: doubling\n"
      "weights:\n  w: 0.2\nrun:\n  p: 0.1\n";
  const RunConfig c = parse_config(text);
  CHECK(c.half_length == 40.0);
  CHECK(c.num_points == 512);
  CHECK(c.epsilon == 0.02);
  CHECK(std::abs(c.energy - 0.75 * std::log(2.0)) < 1e-15);
  CHECK(c.w == 0.2);
  CHECK(c.p == 0.1);

  const RunConfig again = parse_config(dump_config(c));
  CHECK(dump_config(again) == dump_config(c));

  SUBCASE("weight outside the admissible interval") {
    try {
      parse_config("weights:\n  w: 0.5\n");
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "weights.w");
    }
  }
  SUBCASE("unknown key reports its line") {
    try {
      parse_config("grid:\n  half_length: 40\n  nmu_points: 512\n");
      FAIL("expected rejection");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("other physical constraints") {
    CHECK_THROWS_AS(parse_config("soliton:\n  c_star: -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("forcing:\n  epsilon: 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid:\n  num_points: 63\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("weights:\n  w: 0.25\n  w_min: 0.2\n  w_inf: 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("solver:\n  scheme: euler\n"), ConfigError);
  }
  SUBCASE("shipped configuration loads") {
    const RunConfig d = load_config(fs::path(FKDV_SOURCE_DIR) / "configs" / "doubling.yaml");
    CHECK(d.epsilon == 0.01);
    CHECK(d.snapshot_times.size() == 4);
  }
}

TEST_CASE("perturbation shapes are normalised") {
  RunConfig c = short_config();
  for (PerturbationKind k : {PerturbationKind::odd, PerturbationKind::even, PerturbationKind::random}) {
    c.perturbation.kind = k;
    const Field p = initial_perturbation(c);
    CHECK(rel(weighted_h1(p, c.w), c.perturbation.h1w_norm) < 1e-12);
  }
  c.perturbation.kind = PerturbationKind::random;
  CHECK((initial_perturbation(c) - initial_perturbation(c)).max_abs() == 0.0);
}

TEST_CASE("snapshot round trip") {
  const fs::path dir = scratch("snap");
  const GridSpec g = make_grid(40.0, 512);
  const Field u = sample_phi_at({1.2, 0.3}, g);
  write_snapshot(dir / "s", u, 2.5, ForcingSpec{0.01, 1.0, ForcingProfile::exp_decay()});
  const Snapshot s = read_snapshot(dir / "s");
  CHECK(s.meta.t == 2.5);
  CHECK(s.field.grid() == g);
  CHECK((s.field - u).max_abs() == 0.0);
  CHECK_THROWS_AS(read_snapshot(dir / "missing"), std::runtime_error);
}

TEST_CASE("track persistence and report recomputation") {
  const RunConfig cfg = short_config();
  const RunResult run = run_experiment(cfg, false);
  REQUIRE(run.report_error.empty());
  const fs::path dir = scratch("persist");
  persist(run, dir);
  CHECK(fs::exists(dir / "track.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "config.yaml"));

  const ModulationTrack back = read_track_csv(dir / "track.csv", load_config(dir / "config.yaml"));
  REQUIRE(back.rows.size() == run.track.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].c == run.track.rows[i].c);
    CHECK(back.rows[i].h1w_v_schedule == run.track.rows[i].h1w_v_schedule);
  }
  // Every flag follows from the CSV alone.
  const TheoremReport again = theorem_suite(back, cfg);
  CHECK(again.flags == run.report.flags);
  CHECK(again.decay_rate == run.report.decay_rate);
  CHECK(again.sup_speed_gap == run.report.sup_speed_gap);
  CHECK(again.midpoint_margin == run.report.midpoint_margin);
  CHECK(report_json(again, cfg) == report_json(run.report, cfg));
}

TEST_CASE("identical configurations give identical output") {
  const RunConfig cfg = short_config();
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  persist(run_experiment(cfg, false), a);
  persist(run_experiment(cfg, false), b);
  CHECK(slurp(a / "track.csv") == slurp(b / "track.csv"));
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
}

TEST_CASE("k diagnostic matches recomputation from stored fields") {
  const RunConfig cfg = short_config();
  const RunResult run = run_experiment(cfg, true);
  const ModulationTrack& tr = run.track;
  REQUIRE(tr.centered.size() == tr.rows.size());
  const double eps = tr.forcing.epsilon, gamma = tr.forcing.gamma();
  double running = 0.0, worst = 0.0;
  const std::vector<double> k = k_diagnostic(tr, cfg.p);
  for (std::size_t i = 0; i < tr.rows.size(); ++i) {
    const TrackRow& r = tr.rows[i];
    const Field vbar = tr.centered[i] - sample_phi(r.c, tr.grid);
    // v(x) = alpha^2 vbar(alpha x), alpha from the extracted speed, on a box
    // of half-length L / alpha whose nodes map onto the original ones.
    const double alpha = std::sqrt(tr.c0 / r.c);
    const GridSpec big = make_grid(tr.grid.half_length / alpha, tr.grid.num_points);
    Field v(big, std::vector<double>(vbar.data()));
    v *= alpha * alpha;
    const double wv = weighted_h1(v, WeightPair{r.w_minus, r.w_plus});
    const double hv = weighted_h1(v, WeightPair{});
    worst = std::max(worst, rel(wv, r.h1w_v_schedule));
    running = std::max(running, std::exp(gamma * r.t) * wv + hv + std::exp(2.0 * gamma * r.t) * wv * wv / gamma);
    const double expect = eps + std::pow(eps, 1.0 + cfg.p) / gamma + running;
    CHECK(rel(k[i], expect) < 1e-12);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("doubling scenario") {
  const RunResult& run = doubling_run();
  REQUIRE(run.report_error.empty());
  const TheoremReport& r = run.report;
  CHECK(r.max_ode_mismatch < 1e-5);
  CHECK(r.max_residual < 1e-9);
  CHECK(std::abs(r.speed_ratio_final - 2.0) < 0.1);
  // At gamma T = 8 the forcing still pushes; the settling follows the
  // predicted drift over the second half.
  const double drift = predicted_speed(run.track.forcing, 1.0, r.horizon) - predicted_speed(run.track.forcing, 1.0, r.horizon / 2);
  CHECK(r.speed_settling <= 1.2 * drift + 1e-4);
  CHECK(r.decay_rate >= 0.8 * r.gamma);
  CHECK(r.decay_rate <= 1.2 * r.gamma);
  CHECK(r.midpoint_margin >= 0.0);
  for (const auto& [name, ok] : r.flags) CHECK_MESSAGE(ok, name);
}

TEST_CASE("speed settles on a long horizon") {
  RunConfig c;
  c.gamma_horizon = 16.0;
  const RunResult run = run_experiment(c, false);
  CHECK(run.report.speed_settling < 1e-3);
  CHECK(std::abs(run.report.speed_ratio_final - 2.0) < 0.05);
}

TEST_CASE("degenerate unforced run") {
  RunConfig cfg = short_config();
  cfg.epsilon = 0.0;
  cfg.perturbation.kind = PerturbationKind::none;
  cfg.horizon = 20.0;
  const RunResult run = run_experiment(cfg, false);
  CHECK_FALSE(run.report_error.empty());
  const ApproximationGap gap = approximation_gap(run.track);
  CHECK(gap.sup_speed < 1e-9);
  CHECK(gap.sup_log_alpha < 1e-9);
  CHECK(gap.sup_omega < 1e-9);
}

TEST_CASE("prediction table") {
  const ForcingSpec f{0.01, 0.75 * std::log(2.0), ForcingProfile::exp_decay()};
  const auto rows = predict_table(f, 1.0, 0.0, {0.0, 10.0, std::numeric_limits<double>::infinity()});
  CHECK(rows[0].c_ap == 1.0);
  CHECK(rows[0].xi_ap == 0.0);
  CHECK(std::abs(rows[2].c_ap - 2.0) < 1e-14);
  CHECK(std::isinf(rows[2].xi_ap));
  CHECK(rows[1].xi_ap > 10.0);
}

TEST_CASE("output root resolution") {
  CHECK(output_root("explicit") == fs::path("explicit"));
  setenv("FKDV_OUTPUT_ROOT", "/tmp/fkdv_env_root", 1);
  CHECK(output_root() == fs::path("/tmp/fkdv_env_root"));
  unsetenv("FKDV_OUTPUT_ROOT");
  CHECK(output_root() == fs::path("runs"));
}

TEST_CASE("property suite") {
  for (const CheckResult& c : property_suite()) CHECK_MESSAGE(c.pass, c.name << " = " << c.value << " (tol " << c.tolerance << ")");
}
