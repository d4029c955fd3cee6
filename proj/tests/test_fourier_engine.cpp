#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "levyrep/errors.hpp"
#include "levyrep/fourier_engine.hpp"
#include "levyrep/representation.hpp"
#include "levyrep/simulator.hpp"
#include "oracles.hpp"

using namespace levyrep;

namespace {
const oracle::Merton kM{0.0, 0.2, 1.0, -0.1, 0.3};
LevyModel merton() { return LevyModel::merton(0, kM.mu, kM.sigma, {kM.gamma, kM.m, kM.delta}); }
}  // namespace

TEST_CASE("Gaussian closed forms") {
  const double mu = 0.05, sigma = 0.25, T = 1.0, c = 0.1;
  const auto bm = LevyModel::brownian(0, mu, sigma);
  const auto dig = DampedPayoff::digital(c, 1.0);
  QuadratureGrid g;
  for (double t : {0.0, 0.4, 0.9}) {
    for (double x : {-0.6, 0.0, 0.1, 0.35}) {
      const double tau = T - t;
      CHECK(std::abs(conditional_value(bm, dig, g, t, x, T).value - oracle::bs_digital(mu, sigma, tau, x, c)) < 1e-9);
      CHECK(std::abs(dF_dx(bm, dig, g, t, x, T).value - oracle::bs_digital_dx(mu, sigma, tau, x, c)) < 1e-8);
      CHECK(std::abs(d2F_dx2(bm, dig, g, t, x, T).value - oracle::bs_digital_dxx(mu, sigma, tau, x, c)) < 1e-7);
      CHECK(std::abs(density(bm, g, t, T, x).value - oracle::bs_density(mu, sigma, tau, x)) < 1e-8);
    }
  }
}

TEST_CASE("Merton value and density against the Poisson mixture") {
  const auto m = merton();
  const auto dig = DampedPayoff::digital(0.0, 1.0);
  QuadratureGrid g;
  for (double t : {0.1, 0.5, 0.95})
    for (double x : {-0.5, -0.05, 0.0, 0.2}) {
      const auto r = conditional_value(m, dig, g, t, x, 1.0);
      CHECK(std::abs(r.value - oracle::merton_digital(kM, 1.0 - t, x, 0.0)) < 1e-9);
      CHECK(std::abs(r.imag_residual) <= 1e-8 * std::max(1.0, std::abs(r.value)));
      CHECK(std::abs(density(m, g, t, 1.0, x).value - oracle::merton_density(kM, 1.0 - t, x)) < 1e-8);
    }
}

TEST_CASE("jump difference and generator") {
  const auto m = merton();
  const auto dig = DampedPayoff::digital(0.0, 1.0);
  QuadratureGrid g;
  for (double y : {-0.4, 0.05, 0.3}) {
    const double ref = oracle::merton_digital(kM, 0.5, 0.1 + y, 0.0) - oracle::merton_digital(kM, 0.5, 0.1, 0.0);
    CHECK(std::abs(jump_difference(m, dig, g, 0.5, 0.1, y, 1.0).value - ref) < 1e-9);
  }
  // both PIDE modes use the same derivatives, so their jump terms must agree
  for (double x : {-0.3, 0.02, 0.25}) {
    const auto a = pide_residual(m, dig, g, 0.4, x, 1.0, PideMode::FourierCompensated);
    const auto b = pide_residual(m, dig, g, 0.4, x, 1.0, PideMode::DirectQuadrature);
    CHECK(std::abs(a.jump_term - b.jump_term) < 1e-7);
    CHECK(std::abs(a.residual) < 1e-7 * std::max(1.0, std::abs(a.dF_dt)));
  }
}

TEST_CASE("value converges to the payoff near maturity") {
  const auto m = merton();
  const auto dig = DampedPayoff::digital(0.0, 1.0);
  QuadratureGrid g;
  for (double x : {0.05, -0.05}) {
    double prev = 1.0;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
      const double err = std::abs(conditional_value(m, dig, g, 1.0 - tau, x, 1.0).value - dig(x));
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("refining the grid stays within the reported error") {
  const auto m = LevyModel::normal_inverse_gaussian(0, -0.25, {3, -1, 1});
  const auto dig = DampedPayoff::digital(0.0, 1.0);
  QuadratureGrid g;
  for (double x : {-0.2, 0.0, 0.3}) {
    const auto a = conditional_value(m, dig, g, 0.5, x, 1.0);
    QuadratureGrid fine = g;
    fine.v_max = 2.0 * a.v_max;
    fine.n_nodes = 2 * a.n_nodes;
    const auto b = conditional_value(m, dig, fine, 0.5, x, 1.0);
    CHECK(std::abs(a.value - b.value) <= a.err_estimate + 1e-14);
  }
}

TEST_CASE("exponential indicator through the density route") {
  const double mu = -0.02, sigma = 0.3, tau = 0.7;
  const auto bm = LevyModel::brownian(0, mu, sigma);
  const double s = sigma * std::sqrt(tau), mean = mu * tau;
  for (double x : {-0.3, 0.0, 0.4}) {
    const double ref = std::exp(x + mean + 0.5 * s * s) * oracle::norm_cdf((x + mean + s * s) / s);
    const auto r = exp_indicator_F(bm, 0.3, x, 1.0);
    CHECK(std::abs(r.value - ref) < 1e-8);
    CHECK(std::abs(r.derivative - (ref + oracle::bs_density(mu, sigma, tau, -x))) < 1e-8);
    QuadratureGrid g;
    g.alpha = 1.5;
    CHECK(std::abs(conditional_value(bm, DampedPayoff::exp_indicator(1.5), g, 0.3, x, 1.0).value - ref) < 1e-8);
  }
}

TEST_CASE("lattice slice agrees with the contour engine") {
  const auto m = merton();
  const auto dig = DampedPayoff::digital(0.0, 1.0);
  QuadratureGrid g;
  const auto lat = make_lattice(m, dig, 0.3, 1.0, lattice_window(1.0, 2.0),
                                {[](cplx) { return cplx(1.0); }, multiplier::dx});
  for (double x = -1.5; x <= 1.5; x += 0.25) {
    CHECK(std::abs(lat.evaluate(0, x) - conditional_value(m, dig, g, 0.3, x, 1.0).value) < 1e-9);
    CHECK(std::abs(lat.evaluate(1, x) - dF_dx(m, dig, g, 0.3, x, 1.0).value) < 1e-9);
  }
}

TEST_CASE("E[F(t, X_t)] is constant in t") {
  const auto m = merton();
  const auto dig = DampedPayoff::digital(0.0, 1.0);
  const double mean0 = oracle::merton_digital(kM, 1.0, 0.0, 0.0);
  IncrementSampler inc(m);
  for (double t : {0.25, 0.5, 0.75}) {
    const auto lat = make_lattice(m, dig, t, 1.0, lattice_window(1.0, 4.0), {[](cplx) { return cplx(1.0); }});
    std::vector<double> v;
    for (int i = 0; i < 20000; ++i) {
      auto rng = path_rng(77, i + static_cast<int>(t * 1e6));
      v.push_back(lat.evaluate(0, inc.sample(t, rng)));
    }
    CHECK(std::abs(oracle::mean(v) - mean0) < 3.0 * oracle::std_error(v));
  }
}

TEST_CASE("density integrates to one") {
  const auto nig = LevyModel::normal_inverse_gaussian(0, -0.25, {3, -1, 1});
  QuadratureGrid g;
  auto p = [&](double y) { return density(nig, g, 0.0, 1.0, y).value; };
  const double total = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(p, -12.0, 12.0, 10, 1e-12);
  CHECK(std::abs(total - 1.0) < 1e-6);
}

TEST_CASE("grid validation") {
  QuadratureGrid g;
  g.n_nodes = 63;
  CHECK_THROWS_AS(g.validate(), ParameterError);
  g.n_nodes = 32;
  CHECK_THROWS_AS(g.validate(), ParameterError);
  CHECK(to_string(parse_rule(to_string(QuadratureRule::UniformSimpson))) == "uniform_simpson");
}
