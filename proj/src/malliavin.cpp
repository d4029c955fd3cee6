#include "levyrep/malliavin.hpp"

#include <cmath>

#include "levyrep/quadrature.hpp"

namespace levyrep {

std::string to_string(MalliavinVerdict v) {
  return v == MalliavinVerdict::Differentiable ? "Differentiable" : "NotDifferentiable";
}

std::string to_string(TruncationTrend t) {
  switch (t) {
    case TruncationTrend::Convergent: return "convergent";
    case TruncationTrend::Divergent: return "divergent";
    default: return "unclear";
  }
}

double truncated_first_moment(const JumpMeasure& nu, double eps) {
  if (nu.empty() || eps >= 1.0) return 0.0;
  QuadratureOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-11;
  // x = e^u, |x| nu(x) dx = x^2 nu(x) du
  auto f = [&](double u) {
    const double x = std::exp(u);
    return x * x * (nu.density(x) + nu.density(-x));
  };
  return integrate_adaptive(f, std::log(eps), 0.0, opt).value;
}

MalliavinReport malliavin_classify(const LevyModel& model) {
  MalliavinReport r;
  const auto& nu = model.jumps();
  for (int k = 1; k <= 6; ++k) {
    const double e = std::pow(10.0, -k);
    r.eps.push_back(e);
    r.truncated.push_back(truncated_first_moment(nu, e));
  }
  const auto& I = r.truncated;
  const double first = I.front(), last = I.back();
  r.ratio = first > 0.0 ? last / first : (last > 0.0 ? INFINITY : 1.0);
  r.cauchy_gap = std::abs(I[5] - I[4]);
  // Successive increments shrink geometrically when the integral converges
  // and stay level (or grow) when it diverges.
  const double d_prev = I[4] - I[3];
  const double d_last = I[5] - I[4];
  const double scale = std::max(last, 1e-300);
  if (last == 0.0 || d_last <= 1e-6 * scale || d_last < 0.5 * d_prev) {
    r.trend = TruncationTrend::Convergent;
  } else if (d_last >= 0.8 * d_prev) {
    r.trend = TruncationTrend::Divergent;
  }

  if (model.sigma() > 0.0) {
    r.verdict = MalliavinVerdict::NotDifferentiable;
    r.reason = "sigma > 0: the indicator is not in D^{1,2} when a Brownian part is present";
  } else if (nu.empty()) {
    r.verdict = MalliavinVerdict::Differentiable;
    r.reason = "deterministic X_T: the indicator is constant";
  } else if (nu.finite_variation()) {
    r.verdict = MalliavinVerdict::Differentiable;
    r.reason = "pure jump with int_{|x|<1} |x| nu(dx) < inf";
  } else {
    r.verdict = MalliavinVerdict::NotDifferentiable;
    r.reason = "pure jump with int_{|x|<1} |x| nu(dx) = inf";
  }
  r.caveat = "assumes X_T has a bounded continuous density p with p(c) > 0";
  return r;
}

}  // namespace levyrep
