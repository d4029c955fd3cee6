#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "levyrep/bessel.hpp"
#include "levyrep/quadrature.hpp"

using namespace levyrep;

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  for (int n : {4, 8, 16}) {
    const auto& r = gauss_legendre(n);
    double w = 0.0, p = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      w += r.weights[k];
      p += r.weights[k] * std::pow(r.nodes[k], 2 * n - 2);
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("adaptive quadrature matches boost on an oscillatory integrand") {
  auto f = [](double x) { return std::cos(40.0 * x) * std::exp(-x); };
  const double ours = integrate_adaptive(f, 0.0, 3.0).value;
  const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 3.0, 15, 1e-13);
  CHECK(std::abs(ours - ref) < 1e-11);
}

TEST_CASE("semi-infinite integrals") {
  auto g = [](double x) { return std::exp(-x * x); };
  CHECK(integrate_to_infinity(g, 0.0).value == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-10));
  CHECK(integrate_from_minus_infinity(g, 0.0).value == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-10));
}

TEST_CASE("non-convergent quadrature raises") {
  auto bad = [](double x) { return 1.0 / x; };
  QuadratureOptions opt;
  opt.max_intervals = 50;
  CHECK_THROWS_AS(integrate_adaptive(bad, 0.0, 1.0, opt), QuadratureError);
}

TEST_CASE("K1 against boost and the large-argument form") {
  for (double x : {1e-4, 0.7e-2, 500.0, 700.0, 0.01, 0.3, 1.0, 1.9, 2.0, 2.1, 3.5, 7.0, 15.0, 40.0, 200.0}) {
    const double ref = boost::math::cyl_bessel_k(1, x);
    CHECK(std::abs(bessel_k1(x) / ref - 1.0) < 1e-12);
    CHECK(std::abs(bessel_k1_scaled(x) / (ref * std::exp(x)) - 1.0) < 1e-12);
  }
  for (double x = 10.0; x < 500.0; x *= 1.7)
    CHECK(std::abs(bessel_k1_asymptotic(x) / bessel_k1(x) - 1.0) < 0.1);
}
