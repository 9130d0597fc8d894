#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fkdv/kernels.hpp"
#include "fkdv/soliton.hpp"

using namespace fkdv;

namespace {

struct Inputs {
  GridSpec grid;
  Field f, g;
  Spectrum coeffs;
  std::vector<double> points;

  explicit Inputs(std::size_t n)
      : grid(make_grid(50.0, n)), f(sample_phi(1.0, grid)), g(sample_dphi_dc(1.0, grid)), coeffs(to_spectrum(f)) {
    points.resize(n);
    for (std::size_t i = 0; i < n; ++i) points[i] = 0.7 * grid.x(i) + 0.01;
  }
};

template <bool Parallel>
void weighted_dot(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    double v = Parallel ? kernels::weighted_dot(in.grid, in.f.data(), in.g.data(), 0.1, 0.3)
                        : kernels::reference::weighted_dot(in.grid, in.f.data(), in.g.data(), 0.1, 0.3);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void trig_interpolate(benchmark::State& state) {
  const Inputs in(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(in.points.size());
  for (auto _ : state) {
    if (Parallel)
      kernels::trig_interpolate(in.grid, in.coeffs, in.points, out, true);
    else
      kernels::reference::trig_interpolate(in.grid, in.coeffs, in.points, out, true);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void diff_matrix(benchmark::State& state) {
  const GridSpec g = make_grid(50.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    Eigen::MatrixXd d = Parallel ? kernels::diff_matrix(g) : kernels::reference::diff_matrix(g);
    benchmark::DoNotOptimize(d.data());
  }
}

}  // namespace

BENCHMARK(weighted_dot<true>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(weighted_dot<false>)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(trig_interpolate<true>)->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(trig_interpolate<false>)->RangeMultiplier(2)->Range(256, 2048);
BENCHMARK(diff_matrix<true>)->RangeMultiplier(2)->Range(256, 1024);
BENCHMARK(diff_matrix<false>)->RangeMultiplier(2)->Range(256, 1024);
BENCHMARK_MAIN();
