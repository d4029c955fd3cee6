#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "levyrep/errors.hpp"
#include "levyrep/payoffs.hpp"

using namespace levyrep;
using boost::math::quadrature::gauss_kronrod;

namespace {

// int e^{izy} f(x + y) dy over [lo, inf) or (-inf, hi] by brute force
template <class F>
cplx brute_transform(F f, double x, cplx z, double a, double b) {
  auto part = [&](bool imag) {
    auto g = [&](double y) {
      const cplx v = std::exp(cplx(0, 1) * z * y) * f(x + y);
      return imag ? v.imag() : v.real();
    };
    return gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-13);
  };
  return {part(false), part(true)};
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("translation identity for every closed-form transform") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> X(-2, 2), V(-30, 30);
  const DampedPayoff payoffs[] = {DampedPayoff::digital(0.3, 1.0), DampedPayoff::exp_indicator(1.5),
                                  DampedPayoff::sqrt_abs_plus(1.0), DampedPayoff::sqrt_abs_minus(-1.0)};
  for (const auto& p : payoffs) {
    for (int i = 0; i < 100; ++i) {
      const double x = X(rng);
      const cplx z(V(rng), p.alpha());
      const cplx lhs = p.transform(x, z);
      const cplx rhs = std::exp(-cplx(0, 1) * z * x) * p.transform_at_zero(z);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("closed forms match brute-force transforms") {
  const double c = 0.2, x = -0.1;
  for (double v : {-1.5, 0.0, 0.7, 2.0}) {
    const cplx z(v, 1.0);
    const auto dig = DampedPayoff::digital(c, 1.0);
    const cplx ref = brute_transform([&](double s) { return s >= c ? 1.0 : 0.0; }, x, z, c - x, kInf);
    CHECK(std::abs(dig.transform(x, z) - ref) < 1e-9);
    CHECK(std::abs(digital_transform(c, x, z) - ref) < 1e-9);

    const cplx zp(v, 2.0);
    const auto ei = DampedPayoff::exp_indicator(2.0);
    // exponents combined so the tail stays finite
    auto g = [&](bool imag) {
      auto h = [&](double y) {
        const cplx e = std::exp(cplx(0, 1) * zp * y + (x + y));
        return imag ? e.imag() : e.real();
      };
      return gauss_kronrod<double, 61>::integrate(h, -x, kInf, 15, 1e-13);
    };
    const cplx ref_e(g(false), g(true));
    CHECK(std::abs(ei.transform(x, zp) - ref_e) < 1e-9);

    auto splus = [](double s) { return s > 0 ? std::sqrt(s) : 0.0; };
    auto sminus = [](double s) { return s < 0 ? std::sqrt(-s) : 0.0; };
    const cplx ref_p = brute_transform(splus, x, z, -x, kInf);
    CHECK(std::abs(sqrt_parts_transform(SqrtPart::Plus, x, z) - ref_p) < 1e-8);
    const cplx zm(v, -1.0);
    const cplx ref_m = brute_transform(sminus, x, zm, -kInf, -x);
    CHECK(std::abs(sqrt_parts_transform(SqrtPart::Minus, x, zm) - ref_m) < 1e-8);
  }
}

TEST_CASE("derivative transform is -iz times the transform") {
  const cplx z(0.8, 1.0);
  CHECK(std::abs(derivative_transform(SqrtPart::Plus, 0.3, z) -
                 -cplx(0, 1) * z * sqrt_parts_transform(SqrtPart::Plus, 0.3, z)) < 1e-14);
}

TEST_CASE("contour side is enforced") {
  CHECK_THROWS_AS(digital_transform(0.0, 0.0, cplx(1.0, -0.5)), DomainError);
  CHECK_THROWS_AS(DampedPayoff::sqrt_abs_minus(-1.0).transform(0.0, cplx(1.0, 0.5)), DomainError);
  CHECK_FALSE(DampedPayoff::polynomial({1.0, 2.0}).has_transform());
  CHECK_FALSE(DampedPayoff::sqrt_abs().has_transform());
}

TEST_CASE("sqrt|x| decomposition is exact pointwise") {
  const auto d = decompose(DampedPayoff::sqrt_abs());
  REQUIRE(d.parts.size() == 2);
  for (int i = 0; i < 1000; ++i) {
    const double x = -5.0 + 10.0 * i / 999.0;
    CHECK(d(x) == std::sqrt(std::abs(x)));
  }
  CHECK(d.parts[0].payoff.alpha() * d.parts[1].payoff.alpha() < 0);
}

TEST_CASE("damped boundedness") {
  for (const auto& p : {DampedPayoff::digital(0.0, 1.0), DampedPayoff::sqrt_abs_plus(1.0),
                        DampedPayoff::sqrt_abs_minus(-1.0)}) {
    const double c = damped_bound(p);
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
  }
  // |z g^(0, -iz)| = 1 for the digital at c = 0
  CHECK(damped_bound(DampedPayoff::digital(0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("payoff admissibility checker") {
  const auto m = LevyModel::merton(0, 0, 0.2, {1, -0.1, 0.3});
  const auto a = check_assumption2(DampedPayoff::digital(0.0, 1.0), m);
  CHECK(a.passed);
  CHECK(a.l1_norm == doctest::Approx(1.0).epsilon(1e-8));  // int_0^inf e^{-x} dx
  CHECK(a.finite_variation);
  CHECK(a.square_integrable);
}

TEST_CASE("payoff values and default damping") {
  CHECK(DampedPayoff::digital(0.5)(0.5) == 1.0);
  CHECK(DampedPayoff::digital(0.5)(0.49) == 0.0);
  CHECK(DampedPayoff::polynomial({1, 0, 2})(3.0) == 19.0);
  CHECK(DampedPayoff::polynomial({1, 0, 2}).derivative(3.0) == 12.0);
  const auto m = LevyModel::merton(0, 0, 0.2, {1, -0.1, 0.3});
  CHECK(default_alpha(PayoffKind::Digital, m) == 1.0);
  const auto vg = LevyModel::variance_gamma(0, 0, {1, 5, 0.8});
  const double a = default_alpha(PayoffKind::Digital, vg);
  CHECK(a > 0.0);
  CHECK(a < 0.8);
}
