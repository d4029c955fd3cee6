#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "levyrep/errors.hpp"
#include "levyrep/mmm.hpp"
#include "oracles.hpp"

using namespace levyrep;

namespace {
MarketSpec merton_market(double mu = -0.1) {
  return {0.02, 1.0, 1.0, LevyModel::merton(0, mu, 0.2, {1, -0.1, 0.3})};
}
MarketSpec nig_market() {
  return {0.02, 1.0, 1.0, LevyModel::normal_inverse_gaussian(0, -0.25, {3, -1, 1})};
}
}  // namespace

TEST_CASE("Merton constants from the lognormal moments") {
  const double g = 1, m = -0.1, d = 0.3, sigma = 0.2, mu = -0.1;
  const double e1 = std::exp(m + 0.5 * d * d), e2 = std::exp(2 * m + 2 * d * d);
  const double c2 = g * (e2 - 2 * e1 + 1);
  const double mu_hat = mu + 0.5 * sigma * sigma + g * (e1 - 1 - m);
  const auto mmm = build_mmm(merton_market());
  CHECK(mmm.c2 == doctest::Approx(c2).epsilon(1e-12));
  CHECK(mmm.mu_hat == doctest::Approx(mu_hat).epsilon(1e-12));
  CHECK(mmm.k == doctest::Approx(mu_hat / (sigma * sigma + c2)).epsilon(1e-12));
  CHECK(mmm.c2 == doctest::Approx(0.0872284).epsilon(1e-6));
  CHECK(mmm.k == doctest::Approx(-0.263423).epsilon(1e-5));
}

TEST_CASE("star measure is a martingale measure") {
  for (const auto& mk : {merton_market(), nig_market()}) {
    const auto mmm = build_mmm(mk);
    CHECK(std::abs(mmm.psi_star(cplx(0, -1))) < 1e-8);
    // density of nu* is (1 - k(e^x - 1)) times the physical one
    for (double x : {-0.7, -0.05, 0.02, 0.4}) {
      CHECK(mmm.star_density_factor(x) > 0);
      CHECK(mmm.star.levy_density(x) ==
            doctest::Approx(mmm.star_density_factor(x) * mk.model.levy_density(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("second moment of (e^x - 1) under nu* is finite") {
  const auto mmm = build_mmm(merton_market());
  auto f = [&](double x) { return std::expm1(x) * std::expm1(x) * mmm.star.levy_density(x); };
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -4.0, 4.0, 10, 1e-12);
  CHECK(std::isfinite(v));
  CHECK(v > 0);
}

TEST_CASE("violated market conditions are reported") {
  CHECK_THROWS_AS(build_mmm(merton_market(0.5)), AssumptionError);
  // no second exponential moment
  MarketSpec heavy{0.0, 1.0, 1.0, LevyModel::variance_gamma(0, -0.2, {1, 5, 1.5})};
  CHECK_THROWS_AS(build_mmm(heavy), AssumptionError);
  const auto a = check_assumption3(heavy);
  CHECK_FALSE(a.passed);
  CHECK(a.failed_part() == "C2");
  CHECK_THROWS_AS((MarketSpec{-0.1, 1.0, 1.0, merton_market().model}).validate(), ParameterError);
}

TEST_CASE("hedging admissibility verdicts") {
  CHECK(check_assumption3(merton_market()).passed);
  CHECK(check_assumption3(nig_market(), 2.0).passed);
  MarketSpec vg{0.02, 1.0, 1.0, LevyModel::variance_gamma(0, -0.05, {1, 5, 5})};
  const auto a = check_assumption3(vg);
  CHECK_FALSE(a.passed);
  CHECK(a.failed_part() == "decay");
}

TEST_CASE("density process has unit mean") {
  const auto mk = merton_market();
  const auto mmm = build_mmm(mk);
  SimulationSpec s;
  s.n_steps = 1;
  PathSimulator sim(mk.model, s);
  std::vector<double> z, zs;
  for (int i = 0; i < 40000; ++i) {
    const auto p = sim.simulate(12, i);
    const double v = std::exp(mmm_log_density(mmm, sim, p));
    z.push_back(v);
    zs.push_back(v * std::exp(p.x.back()));
  }
  CHECK(std::abs(oracle::mean(z) - 1.0) < 3 * oracle::std_error(z));
  // and the discounted price is a martingale after reweighting
  CHECK(std::abs(oracle::mean(zs) - 1.0) < 3 * oracle::std_error(zs));
}

TEST_CASE("density needs marks") {
  const auto mk = nig_market();
  const auto mmm = build_mmm(mk);
  SimulationSpec s;
  s.exact_increments = true;
  PathSimulator sim(mk.model, s);
  CHECK_THROWS_AS(mmm_log_density(mmm, sim, sim.simulate(1, 0)), SchemeError);
}

TEST_CASE("zero market price of risk") {
  MarketSpec mk{0.0, 1.0, 1.0, LevyModel::brownian(0, -0.02, 0.2)};
  const auto mmm = build_mmm(mk);
  CHECK(mmm.k == 0.0);
  CHECK(mmm.mu_star == doctest::Approx(-0.02).epsilon(1e-14));
}
