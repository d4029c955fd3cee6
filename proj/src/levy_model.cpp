#include "levyrep/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "levyrep/errors.hpp"
#include "levyrep/quadrature.hpp"

namespace levyrep {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Merton: return "merton";
    case ModelKind::VarianceGamma: return "vg";
    case ModelKind::NormalInverseGaussian: return "nig";
    case ModelKind::BrownianOnly: return "brownian";
    case ModelKind::Custom: return "custom";
    case ModelKind::MinimalMartingale: return "mmm";
  }
  return "unknown";
}

LevyModel::LevyModel(ModelKind kind, double x0, double mu, double sigma,
                     JumpMeasure jumps)
    : kind_(kind), x0_(x0), mu_(mu), sigma_(sigma), jumps_(std::move(jumps)) {
  if (!std::isfinite(x0) || !std::isfinite(mu))
    throw ParameterError("x0 and mu must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw ParameterError("sigma must be finite and >= 0");
  if ((kind == ModelKind::VarianceGamma || kind == ModelKind::NormalInverseGaussian) &&
      sigma != 0.0)
    throw ParameterError("VG and NIG models are pure jump (sigma = 0)");
  if (kind == ModelKind::BrownianOnly && !jumps_.empty())
    throw ParameterError("a Brownian-only model has no jumps");
}

LevyModel LevyModel::brownian(double x0, double mu, double sigma) {
  return LevyModel(ModelKind::BrownianOnly, x0, mu, sigma, JumpMeasure{});
}

LevyModel LevyModel::merton(double x0, double mu, double sigma, const MertonParams& p) {
  return LevyModel(ModelKind::Merton, x0, mu, sigma,
                   JumpMeasure({MertonJumps{p.gamma, p.m, p.delta}}));
}

LevyModel LevyModel::variance_gamma(double x0, double mu, const VgParams& p) {
  return LevyModel(ModelKind::VarianceGamma, x0, mu, 0.0,
                   JumpMeasure({VgJumps{p.c, p.g, p.m}}));
}

LevyModel LevyModel::normal_inverse_gaussian(double x0, double mu, const NigParams& p) {
  return LevyModel(ModelKind::NormalInverseGaussian, x0, mu, 0.0,
                   JumpMeasure({NigJumps{p.a, p.b, p.delta}}));
}

LevyModel LevyModel::custom(double x0, double mu, double sigma, JumpMeasure jumps) {
  return LevyModel(ModelKind::Custom, x0, mu, sigma, std::move(jumps));
}

LevyModel LevyModel::with_x0(double x0) const {
  LevyModel copy = *this;
  copy.x0_ = x0;
  return copy;
}

cplx LevyModel::psi(cplx z) const {
  const cplx iz(-z.imag(), z.real());
  return iz * mu_ - 0.5 * sigma_ * sigma_ * z * z + jumps_.exponent(z);
}

cplx characteristic_exponent(const LevyModel& model, cplx z) { return model.psi(z); }

cplx characteristic_function(const LevyModel& model, double t, double T, cplx z) {
  if (t > T) throw DomainError("characteristic_function requires t <= T");
  if (t == T) return {1.0, 0.0};
  return std::exp((T - t) * model.psi(z));
}

MomentCheck check_exponential_moment(const LevyModel& model, double alpha) {
  MomentCheck out;
  const auto& jumps = model.jumps();
  if (jumps.empty()) {
    out.finite = true;
    out.value = 0.0;
    out.diagnostic = "no jumps: every exponential moment is finite";
    return out;
  }
  const auto interval = jumps.exponential_moment_interval();
  std::ostringstream msg;
  if (!interval.contains(alpha) && alpha != 0.0) {
    out.finite = false;
    out.value = kInf;
    msg << "int_{|x|>=1} e^{" << alpha << " x} nu(dx) diverges; admissible interval ("
        << interval.lower << ", " << interval.upper << ")";
    out.diagnostic = msg.str();
    return out;
  }
  QuadratureOptions opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-9;
  auto f = [&](double x) {
    const double d = jumps.density(x);
    return d > 0.0 ? std::exp(alpha * x + std::log(d)) : 0.0;
  };
  out.value = integrate_to_infinity(f, 1.0, opt).value +
              integrate_from_minus_infinity(f, -1.0, opt).value;
  out.finite = std::isfinite(out.value);
  msg << "int_{|x|>=1} e^{" << alpha << " x} nu(dx) = " << out.value
      << "; admissible interval (" << interval.lower << ", " << interval.upper << ")";
  out.diagnostic = msg.str();
  return out;
}

namespace {

double decay_integrand(const LevyModel& model, double alpha, double tau, double v) {
  const cplx zv(-alpha, v);
  const cplx izv(-v, -alpha);  // i z_v
  const cplx phi = std::exp(tau * model.psi(izv));
  const cplx jump = model.jumps().exponent(izv);
  const double az = std::abs(zv);
  return std::abs(phi) * (1.0 + az + std::abs(jump) / az);
}

struct SlopeVerdict {
  bool passed;
  double slope;  // +inf for faster-than-polynomial decay
  double tail;
  double extent;
};

SlopeVerdict classify_tail(const LevyModel& model, double alpha, double tau,
                           const DecayOptions& opt) {
  constexpr double kSuperPolySlope = 40.0;
  std::vector<double> v, h, slopes;
  double vk = opt.v_start;
  for (int k = 0; k <= opt.max_doublings; ++k, vk *= 2.0) {
    v.push_back(vk);
    h.push_back(decay_integrand(model, alpha, tau, vk));
    const std::size_t n = h.size();
    if (h.back() == 0.0) return {true, kInf, 0.0, vk};
    if (!std::isfinite(h.back())) break;
    if (n >= 2) {
      const double p = std::log2(h[n - 2] / h[n - 1]);
      slopes.push_back(p);
      if (p > kSuperPolySlope) return {true, kInf, h.back() * vk / p, vk};
    }
  }
  const std::size_t m = slopes.size();
  if (m >= 3 && std::isfinite(h.back())) {
    const double p = slopes[m - 1];
    const bool stable = std::abs(slopes[m - 1] - slopes[m - 2]) < 0.01 &&
                        std::abs(slopes[m - 2] - slopes[m - 3]) < 0.01;
    if (stable) {
      const double extent = v.back();
      if (p > 1.0 + opt.slope_margin)
        return {true, p, h.back() * extent / (p - 1.0), extent};
      if (p < 1.0 - opt.slope_margin) return {false, p, kInf, extent};
    }
  }
  std::ostringstream msg;
  msg << "decay of the dominating integrand could not be classified up to v = "
      << v.back() << " (tau = " << tau << ", last slope "
      << (slopes.empty() ? 0.0 : slopes.back()) << ")";
  throw InconclusiveError(msg.str());
}

}  // namespace

DecayCheck check_decay_condition(const LevyModel& model, double alpha, double t,
                                 double T, const DecayOptions& options) {
  if (!(t >= 0.0 && t < T)) throw DomainError("decay check requires 0 <= t < T");
  const auto moment = check_exponential_moment(model, alpha);
  if (!moment.finite)
    throw DomainError("decay check requires a finite exponential moment: " +
                      moment.diagnostic);
  DecayCheck out;
  out.passed = true;
  out.worst_slope = kInf;
  const int n = std::max(options.tbar_samples, 2);
  const double lo = 0.5 * t;
  const double hi = 0.5 * (T + t);
  for (int i = 0; i < n; ++i) {
    const double tbar = lo + (hi - lo) * i / (n - 1);
    const auto verdict = classify_tail(model, alpha, T - tbar, options);
    out.v_extent = std::max(out.v_extent, verdict.extent);
    if (!verdict.passed || verdict.slope < out.worst_slope || i == 0) {
      if (verdict.slope <= out.worst_slope) {
        out.worst_slope = verdict.slope;
        out.worst_tbar = tbar;
      }
    }
    out.tail_estimate = std::max(out.tail_estimate, verdict.tail);
    out.passed = out.passed && verdict.passed;
  }
  std::ostringstream msg;
  if (out.passed) {
    msg << "integrable: ";
    if (std::isinf(out.worst_slope))
      msg << "faster-than-polynomial decay at every sampled tbar";
    else
      msg << "worst power-law decay v^-" << out.worst_slope << " at tbar = "
          << out.worst_tbar;
  } else {
    msg << "not integrable: decay v^-" << out.worst_slope << " (<= 1) at tbar = "
        << out.worst_tbar;
  }
  out.diagnostic = msg.str();
  return out;
}

SquareIntegrability check_square_integrability(const LevyModel& model) {
  SquareIntegrability out;
  if (model.jumps().empty()) {
    out.finite = true;
    return out;
  }
  out.second_moment = model.jumps().moment(2);
  // Every component has either an analytic second moment or compact support,
  // so the tail beyond the tabulated range is exactly zero.
  out.tail_estimate = 0.0;
  out.finite = std::isfinite(out.second_moment) && out.tail_estimate <= 1e-6;
  return out;
}

}  // namespace levyrep
