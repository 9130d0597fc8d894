#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fkdv/kernels.hpp"
#include "fkdv/norms.hpp"
#include "fkdv/soliton.hpp"
#include "fkdv/spectral.hpp"
#include "fkdv/weights.hpp"
#include "helpers.hpp"

using namespace fkdv;
using fkdv::testing::random_smooth;
using fkdv::testing::rel;

namespace {

double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

}  // namespace

TEST_CASE("grid construction") {
  const GridSpec g = make_grid(50.0, 1024);
  CHECK(g.spacing == 0.09765625);
  CHECK(g.spacing * static_cast<double>(g.num_points) == doctest::Approx(2.0 * g.half_length).epsilon(1e-15));
  CHECK_THROWS_AS(make_grid(50.0, 63), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(50.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-1.0, 128), std::invalid_argument);
  const GridSpec p = make_grid(std::numbers::pi, 64);
  CHECK(std::abs(p.x(32)) < 1e-15);
}

TEST_CASE("spectral derivative") {
  const GridSpec g = make_grid(50.0, 1024);
  const double L = g.half_length, pi = std::numbers::pi;
  SUBCASE("constant") {
    const Field one = Field::sample(g, [](double) { return 1.0; });
    CHECK(derivative(one, 1).max_abs() < 1e-14);
  }
  SUBCASE("lowest mode") {
    const Field s = Field::sample(g, [&](double x) { return std::sin(pi * x / L); });
    const Field ds = derivative(s, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < g.num_points; ++i) err = std::max(err, std::abs(ds[i] - pi / L * std::cos(pi * g.x(i) / L)));
    CHECK(err < 1e-12);
  }
  SUBCASE("resolved modes of every order") {
    for (int m : {3, 40, 200}) {
      const double k = pi * m / L;
      const Field s = Field::sample(g, [&](double x) { return std::cos(k * x); });
      for (int order = 1; order <= 3; ++order) {
        const Field d = derivative(s, order);
        double err = 0.0;
        for (std::size_t i = 0; i < g.num_points; ++i) {
          const double x = g.x(i);
          const double exact = order == 1 ? -k * std::sin(k * x) : order == 2 ? -k * k * std::cos(k * x) : k * k * k * std::sin(k * x);
          err = std::max(err, std::abs(d[i] - exact));
        }
        // Round-off of an order-m spectral derivative grows like kmax^m.
        const double floor = 1e-14 * std::pow(max_wavenumber(g, false), order);
        CHECK(err <= 1e-12 * std::pow(k, order) + (order > 1 ? floor : 0.0));
      }
    }
  }
  SUBCASE("gaussian against analytic derivative") {
    const Field gsn = Field::sample(g, [](double x) { return std::exp(-x * x); });
    const Field d = derivative(gsn, 1);
    double err = 0.0;
    for (std::size_t i = 0; i < g.num_points; ++i) err = std::max(err, std::abs(d[i] + 2.0 * g.x(i) * gsn[i]));
    CHECK(err < 1e-10);
  }
}

TEST_CASE("inner products and Parseval") {
  const GridSpec g = make_grid(50.0, 1024);
  const Field one = Field::sample(g, [](double) { return 1.0; });
  CHECK(inner_product(one, one) == doctest::Approx(100.0).epsilon(1e-14));
  const Field phi = sample_phi(1.0, g);
  CHECK(std::abs(inner_product(phi, phi) - 6.0) < 1e-10);
  CHECK(std::abs(inner_product(sample_dphi_dx(1.0, g), phi)) < 1e-12);

  const Field a = random_smooth(g, 1), b = random_smooth(g, 2);
  const Spectrum ah = to_spectrum(a), bh = to_spectrum(b);
  double spectral = 0.0;
  const std::size_t n = g.num_points;
  for (std::size_t j = 0; j < ah.size(); ++j) {
    const double mult = (j == 0 || j == n / 2) ? 1.0 : 2.0;
    spectral += mult * std::real(ah[j] * std::conj(bh[j]));
  }
  spectral *= g.period() / static_cast<double>(n * n);
  CHECK(rel(inner_product(a, b), spectral) < 1e-12);
}

TEST_CASE("weighted norms against adaptive quadrature") {
  const GridSpec g = make_grid(50.0, 1024);
  const Field phi = sample_phi(1.0, g);
  CHECK(std::abs(weighted_l2(phi, 0.0) - std::sqrt(6.0)) < 1e-10);
  CHECK(rel(weighted_l2(phi, 0.0), l2_norm(phi)) < 1e-14);
  const double oracle = quad([](double x) { const double p = 1.5 / std::pow(std::cosh(0.5 * x), 2); return std::exp(0.6 * x) * p * p; }, -50.0, 50.0);
  CHECK(std::abs(weighted_l2(phi, 0.3) - std::sqrt(oracle)) < 1e-8);
  CHECK(std::abs(weighted_h1(phi, 0.0) - std::sqrt(6.0 + 6.0 / 5.0)) < 1e-8);
  CHECK(weighted_h1(Field(g), 0.25) == 0.0);
}

TEST_CASE("asymmetric weighted norms") {
  const GridSpec g = make_grid(50.0, 1024);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> wd(0.02, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const Field f = random_smooth(g, 100 + trial);
    const double w = wd(rng);
    CHECK(rel(weighted_l2(f, WeightPair{w, w}), weighted_l2(f, w)) < 1e-12);

    const WeightPair pair{wd(rng), wd(rng)};
    const SplitField s = split_at_origin(f);
    const double lhs = std::pow(weighted_l2(f, pair), 2);
    const double rhs = std::pow(weighted_l2(s.negative, pair.minus), 2) + std::pow(weighted_l2(s.positive, pair.plus), 2);
    CHECK(rel(lhs, rhs) < 1e-12);
    CHECK(weighted_h1(f, pair) >= weighted_l2(f, pair));

    // Heavier weights on both sides bound lighter ones.
    const WeightPair b{pair.minus - 0.01, pair.plus + 0.01};
    CHECK(weighted_l2(f, pair) <= weighted_l2(f, b));

    // Multiplying by x costs at most the gap between the weight pairs.
    const Field xf = Field::sample(g, [](double x) { return x; });
    const Field xg = hadamard(xf, f);
    const double bound = std::exp(-2.0) * std::pow(b.minus - pair.minus, -2) * std::pow(weighted_l2(s.negative, b.minus), 2) +
                         std::exp(-2.0) * std::pow(b.plus - pair.plus, -2) * std::pow(weighted_l2(s.positive, b.plus), 2);
    CHECK(std::pow(weighted_l2(xg, pair), 2) <= bound);
  }
  SUBCASE("support on the right half only") {
    const Field f = Field::sample(g, [](double x) { return x > 0.0 ? x * x * x * x * std::exp(-x) : 0.0; });
    const double oracle = quad([](double x) { return std::pow(x, 8) * std::exp(-2.0 * x + 0.4 * x); }, 0.0, 50.0);
    CHECK(rel(weighted_l2(f, WeightPair{0.05, 0.2}), std::sqrt(oracle)) < 1e-8);
    CHECK(rel(weighted_l2(f, WeightPair{0.05, 0.2}), weighted_l2(f, 0.2)) < 1e-14);
  }
  CHECK_THROWS_AS(weighted_l2(random_smooth(g, 1), 8.0), std::domain_error);
}

TEST_CASE("weight schedule") {
  WeightSchedule s{0.03, 0.25, 0.09, 0.02};
  s.validate();
  const WeightPair w0 = s.at(0.0);
  CHECK(w0.minus == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(w0.plus == doctest::Approx(0.25).epsilon(1e-15));
  const WeightPair far = s.at(26.0 / s.gamma);
  CHECK(std::abs(far.minus - 0.09) < 1e-9);
  CHECK(std::abs(far.plus - 0.09) < 1e-9);
  for (double t : {0.0, 3.0, 40.0, 200.0})
    for (double sg : {0.1, 1.0, 10.0, 100.0}) CHECK(s.plus_at(t + sg / 2.0) >= s.plus_at(t + sg));
  WeightSchedule bad = s;
  bad.w_inf = 0.3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("q factor") {
  const WeightSchedule s = default_schedule(0.25, 0.75 * std::log(2.0), 0.01 / (0.75 * std::log(2.0)));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double t = 200.0 * u(rng), sarg = t * u(rng), delta = 0.1 + 5.0 * u(rng);
    CHECK(q_factor(s, t, sarg, delta) > 0.0);
  }
  const double delta = std::pow(0.01, -0.2);
  for (double t : {1.0, 10.0, 100.0}) {
    const SupResult r = sup_weighted_q(s, t, delta);
    double dense = 0.0;
    for (int i = 0; i <= 200000; ++i) {
      const double sv = t * i / 200000.0;
      dense = std::max(dense, std::exp(-s.gamma * sv) * q_factor(s, t, sv, delta));
    }
    CHECK(rel(r.value, dense) < 1e-6);
  }
  std::vector<double> ratios;
  for (double t : {1.0, 10.0, 100.0}) ratios.push_back(q_bound_ratio(s, t, delta));
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 2.0);
}

TEST_CASE("parallel kernels agree with serial reference") {
  const GridSpec g = make_grid(40.0, 512);
  const Field a = random_smooth(g, 11), b = random_smooth(g, 12);
  const double par = kernels::weighted_dot(g, a.values(), b.values(), 0.1, 0.3);
  const double ref = kernels::reference::weighted_dot(g, a.values(), b.values(), 0.1, 0.3);
  CHECK(rel(par, ref) < 1e-12);

  std::vector<double> pts;
  for (int i = 0; i < 777; ++i) pts.push_back(-45.0 + 90.0 * i / 776.0);
  std::vector<double> o1(pts.size()), o2(pts.size());
  const Spectrum ah = to_spectrum(a);
  for (bool zero_outside : {false, true}) {
    kernels::trig_interpolate(g, ah, pts, o1, zero_outside);
    kernels::reference::trig_interpolate(g, ah, pts, o2, zero_outside);
    double err = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, std::abs(o1[i] - o2[i]));
    CHECK(err < 1e-12);
  }
  const Eigen::MatrixXd d1 = kernels::diff_matrix(g), d2 = kernels::reference::diff_matrix(g);
  CHECK((d1 - d2).cwiseAbs().maxCoeff() < 1e-12);

  // The interpolant reproduces the samples at the nodes.
  std::vector<double> nodes = g.nodes(), at_nodes(nodes.size());
  kernels::trig_interpolate(g, ah, nodes, at_nodes, true);
  double err = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) err = std::max(err, std::abs(at_nodes[i] - a[i]));
  CHECK(err < 1e-13);
}
