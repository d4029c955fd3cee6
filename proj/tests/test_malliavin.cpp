#include <doctest.h>

#include <cmath>

#include "levyrep/malliavin.hpp"

using namespace levyrep;

TEST_CASE("verdicts") {
  const auto merton = malliavin_classify(LevyModel::merton(0, 0, 0.2, {1, -0.1, 0.3}));
  CHECK(merton.verdict == MalliavinVerdict::NotDifferentiable);
  const auto jumps_only = malliavin_classify(LevyModel::merton(0, 0, 0.0, {1, -0.1, 0.3}));
  CHECK(jumps_only.verdict == MalliavinVerdict::Differentiable);
  const auto vg = malliavin_classify(LevyModel::variance_gamma(0, -0.05, {1, 5, 5}));
  CHECK(vg.verdict == MalliavinVerdict::Differentiable);
  CHECK(vg.trend == TruncationTrend::Convergent);
  const auto nig = malliavin_classify(LevyModel::normal_inverse_gaussian(0, -0.25, {3, -1, 1}));
  CHECK(nig.verdict == MalliavinVerdict::NotDifferentiable);
  CHECK(nig.trend == TruncationTrend::Divergent);
  CHECK(nig.eps.size() == 6);
}

TEST_CASE("truncated first moment of VG in closed form") {
  const double C = 0.7, G = 4, M = 6;
  const JumpMeasure nu({VgJumps{C, G, M}});
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    const double ref = C / M * (std::exp(-M * eps) - std::exp(-M)) + C / G * (std::exp(-G * eps) - std::exp(-G));
    CHECK(truncated_first_moment(nu, eps) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("VG sequence is Cauchy for a small scale") {
  const auto vg = malliavin_classify(LevyModel::variance_gamma(0, 0, {0.04, 5, 5}));
  CHECK(vg.cauchy_gap < 1e-6);
}

TEST_CASE("NIG truncated moment grows like log(1/eps)") {
  const auto nig = malliavin_classify(LevyModel::normal_inverse_gaussian(0, 0, {3, -1, 1}));
  for (std::size_t k = 1; k < nig.truncated.size(); ++k) CHECK(nig.truncated[k] > nig.truncated[k - 1]);
  // near 0 the density is delta / (pi x^2), so each decade adds about 2 delta ln(10) / pi
  const double step = nig.truncated.back() - nig.truncated[nig.truncated.size() - 2];
  CHECK(step == doctest::Approx(2 * std::log(10.0) / M_PI).epsilon(1e-3));
}
