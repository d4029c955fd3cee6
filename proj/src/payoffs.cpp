#include "levyrep/payoffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "levyrep/errors.hpp"
#include "levyrep/quadrature.hpp"

namespace levyrep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const cplx kI(0.0, 1.0);
const double kGamma32 = 0.5 * std::sqrt(std::numbers::pi);

MomentInterval model_interval(const LevyModel& model) {
  if (model.jumps().empty()) return {-kInf, kInf};
  return model.jumps().exponential_moment_interval();
}

}  // namespace

std::string to_string(PayoffKind kind) {
  switch (kind) {
    case PayoffKind::Digital: return "digital";
    case PayoffKind::ExpIndicator: return "exp_indicator";
    case PayoffKind::SqrtAbs: return "sqrt_abs";
    case PayoffKind::SqrtAbsPlus: return "sqrt_abs_plus";
    case PayoffKind::SqrtAbsMinus: return "sqrt_abs_minus";
    case PayoffKind::Polynomial: return "polynomial";
    case PayoffKind::Custom: return "custom";
  }
  return "unknown";
}

DampedPayoff DampedPayoff::digital(double c, double alpha) {
  if (!std::isfinite(c)) throw ParameterError("digital strike level must be finite");
  if (!(alpha > 0.0)) throw ParameterError("digital payoff needs alpha > 0");
  DampedPayoff p(PayoffKind::Digital, alpha);
  p.c_ = c;
  return p;
}

DampedPayoff DampedPayoff::exp_indicator(double alpha) {
  if (!(alpha > 1.0)) throw ParameterError("e^x 1{x>0} needs alpha > 1");
  return DampedPayoff(PayoffKind::ExpIndicator, alpha);
}

DampedPayoff DampedPayoff::sqrt_abs(double alpha) {
  return DampedPayoff(PayoffKind::SqrtAbs, alpha);
}

DampedPayoff DampedPayoff::sqrt_abs_plus(double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("sqrt(x v 0) needs alpha > 0");
  return DampedPayoff(PayoffKind::SqrtAbsPlus, alpha);
}

DampedPayoff DampedPayoff::sqrt_abs_minus(double alpha) {
  if (!(alpha < 0.0)) throw ParameterError("sqrt((-x) v 0) needs alpha < 0");
  return DampedPayoff(PayoffKind::SqrtAbsMinus, alpha);
}

DampedPayoff DampedPayoff::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  DampedPayoff p(PayoffKind::Polynomial, 0.0);
  p.coeffs_ = std::move(coeffs);
  return p;
}

DampedPayoff DampedPayoff::custom(std::function<double(double)> f, double lo, double hi,
                                  double alpha, std::function<cplx(cplx)> transform_at_zero) {
  if (!f) throw ParameterError("custom payoff needs a function");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ParameterError("custom payoff needs a finite support [lo, hi]");
  DampedPayoff p(PayoffKind::Custom, alpha);
  p.f_ = std::move(f);
  p.lo_ = lo;
  p.hi_ = hi;
  p.custom_transform_ = std::move(transform_at_zero);
  return p;
}

DampedPayoff DampedPayoff::with_alpha(double alpha) const {
  switch (kind_) {
    case PayoffKind::Digital: return digital(c_, alpha);
    case PayoffKind::ExpIndicator: return exp_indicator(alpha);
    case PayoffKind::SqrtAbsPlus: return sqrt_abs_plus(alpha);
    case PayoffKind::SqrtAbsMinus: return sqrt_abs_minus(alpha);
    default: {
      DampedPayoff copy = *this;
      copy.alpha_ = alpha;
      return copy;
    }
  }
}

double DampedPayoff::operator()(double x) const {
  switch (kind_) {
    case PayoffKind::Digital: return x >= c_ ? 1.0 : 0.0;
    case PayoffKind::ExpIndicator: return x > 0.0 ? std::exp(x) : 0.0;
    case PayoffKind::SqrtAbs: return std::sqrt(std::abs(x));
    case PayoffKind::SqrtAbsPlus: return x > 0.0 ? std::sqrt(x) : 0.0;
    case PayoffKind::SqrtAbsMinus: return x < 0.0 ? std::sqrt(-x) : 0.0;
    case PayoffKind::Polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
      return acc;
    }
    case PayoffKind::Custom: return (x >= lo_ && x <= hi_) ? f_(x) : 0.0;
  }
  return 0.0;
}

double DampedPayoff::derivative(double x) const {
  switch (kind_) {
    case PayoffKind::Digital: return 0.0;
    case PayoffKind::ExpIndicator: return x > 0.0 ? std::exp(x) : 0.0;
    case PayoffKind::SqrtAbs:
      return x == 0.0 ? kInf : (x > 0 ? 0.5 / std::sqrt(x) : -0.5 / std::sqrt(-x));
    case PayoffKind::SqrtAbsPlus: return x > 0.0 ? 0.5 / std::sqrt(x) : 0.0;
    case PayoffKind::SqrtAbsMinus: return x < 0.0 ? -0.5 / std::sqrt(-x) : 0.0;
    case PayoffKind::Polynomial: {
      double acc = 0.0;
      for (std::size_t k = coeffs_.size(); k-- > 1;) acc = acc * x + k * coeffs_[k];
      return acc;
    }
    case PayoffKind::Custom: {
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      return ((*this)(x + h) - (*this)(x - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

bool DampedPayoff::has_transform() const {
  return kind_ != PayoffKind::SqrtAbs && kind_ != PayoffKind::Polynomial;
}

void DampedPayoff::check_contour(cplx z) const {
  const double a = z.imag();
  switch (kind_) {
    case PayoffKind::Digital:
    case PayoffKind::SqrtAbsPlus:
      if (!(a > 0.0)) throw DomainError("transform needs Im z > 0");
      break;
    case PayoffKind::ExpIndicator:
      if (!(a > 1.0)) throw DomainError("transform of e^x 1{x>0} needs Im z > 1");
      break;
    case PayoffKind::SqrtAbsMinus:
      if (!(a < 0.0)) throw DomainError("transform of the left part needs Im z < 0");
      break;
    case PayoffKind::SqrtAbs:
    case PayoffKind::Polynomial:
      throw DomainError(to_string(kind_) + " has no damped transform on any contour");
    case PayoffKind::Custom: break;
  }
}

cplx DampedPayoff::transform_at_zero(cplx z) const {
  check_contour(z);
  switch (kind_) {
    case PayoffKind::Digital: return -std::exp(kI * z * c_) / (kI * z);
    case PayoffKind::ExpIndicator: return -1.0 / (kI * z + 1.0);
    case PayoffKind::SqrtAbsPlus: return kGamma32 * std::pow(-kI * z, -1.5);
    case PayoffKind::SqrtAbsMinus: return kGamma32 * std::pow(kI * z, -1.5);
    case PayoffKind::Custom: {
      if (custom_transform_) return custom_transform_(z);
      QuadratureOptions opt;
      opt.abs_tol = 1e-9;
      opt.rel_tol = 1e-7;
      return integrate_adaptive([&](double y) { return std::exp(kI * z * y) * f_(y); },
                                lo_, hi_, opt)
          .value;
    }
    default: break;
  }
  throw DomainError("no transform");
}

cplx DampedPayoff::transform(double x, cplx z) const {
  if (kind_ == PayoffKind::Digital) {
    check_contour(z);
    return -std::exp(kI * z * (c_ - x)) / (kI * z);
  }
  return std::exp(-kI * z * x) * transform_at_zero(z);
}

double DampedPayoff::phase_center() const {
  return kind_ == PayoffKind::Digital ? c_ : 0.0;
}

double DampedPayoff::singularity_distance() const {
  switch (kind_) {
    case PayoffKind::ExpIndicator: return std::abs(alpha_ - 1.0);
    case PayoffKind::Custom: return kInf;
    default: return std::abs(alpha_);
  }
}

double DampedPayoff::sup_norm() const {
  switch (kind_) {
    case PayoffKind::Digital: return 1.0;
    case PayoffKind::Polynomial:
      return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double c) { return c == 0.0; })
                 ? std::abs(coeffs_[0])
                 : kInf;
    case PayoffKind::Custom: {
      double m = 0.0;
      for (int i = 0; i <= 2000; ++i) m = std::max(m, std::abs(f_(lo_ + (hi_ - lo_) * i / 2000.0)));
      return m;
    }
    default: return kInf;
  }
}

double PayoffDecomposition::operator()(double x) const {
  double acc = 0.0;
  for (const auto& part : parts) acc += part.sign * part.payoff(x);
  return acc;
}

PayoffDecomposition decompose(const DampedPayoff& payoff) {
  PayoffDecomposition out;
  if (payoff.kind() == PayoffKind::SqrtAbs) {
    const double a = std::abs(payoff.alpha()) > 0.0 ? std::abs(payoff.alpha()) : 1.0;
    out.parts.push_back({+1, DampedPayoff::sqrt_abs_plus(a)});
    out.parts.push_back({+1, DampedPayoff::sqrt_abs_minus(-a)});
  } else {
    out.parts.push_back({+1, payoff});
  }
  return out;
}

cplx digital_transform(double c, double x, cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("digital_transform needs Im z > 0");
  return -std::exp(kI * z * (c - x)) / (kI * z);
}

cplx sqrt_parts_transform(SqrtPart part, double x, cplx z) {
  if (part == SqrtPart::Plus) {
    if (!(z.imag() > 0.0)) throw DomainError("plus part needs Im z > 0");
    return std::exp(-kI * z * x) * kGamma32 * std::pow(-kI * z, -1.5);
  }
  if (!(z.imag() < 0.0)) throw DomainError("minus part needs Im z < 0");
  return std::exp(-kI * z * x) * kGamma32 * std::pow(kI * z, -1.5);
}

cplx derivative_transform(SqrtPart part, double x, cplx z) {
  return -kI * z * sqrt_parts_transform(part, x, z);
}

double damped_bound(const DampedPayoff& payoff, double v_max, int samples) {
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double v = -v_max + 2.0 * v_max * i / (samples - 1);
    const cplx zv(-payoff.alpha(), v);
    best = std::max(best, std::abs(zv * payoff.transform_at_zero(-kI * zv)));
  }
  return best;
}

Assumption2Check check_assumption2(const DampedPayoff& payoff, const LevyModel& model) {
  Assumption2Check out;
  const double a = payoff.alpha();
  const auto interval = model_interval(model);
  std::ostringstream msg;
  switch (payoff.kind()) {
    case PayoffKind::Digital: {
      out.l1_finite = out.finite_variation = a > 0.0;
      out.l1_norm = std::exp(-a * payoff.strike_level()) / a;
      out.total_variation = 2.0 * std::exp(-a * payoff.strike_level());
      out.square_integrable = true;
      msg << "indicator: f e^{-alpha x} is integrable and of finite variation";
      break;
    }
    case PayoffKind::ExpIndicator: {
      out.l1_finite = out.finite_variation = a > 1.0;
      out.l1_norm = a > 1.0 ? 1.0 / (a - 1.0) : kInf;
      out.total_variation = a > 1.0 ? 2.0 : kInf;
      out.square_integrable = interval.contains(2.0);
      msg << "e^x 1{x>0}: needs alpha > 1 and E[e^{2 X_T}] < inf";
      break;
    }
    case PayoffKind::SqrtAbsPlus:
    case PayoffKind::SqrtAbsMinus: {
      const double b = std::abs(a);
      const bool side_ok = payoff.kind() == PayoffKind::SqrtAbsPlus ? a > 0.0 : a < 0.0;
      out.l1_finite = out.finite_variation = side_ok;
      out.l1_norm = kGamma32 * std::pow(b, -1.5);
      out.total_variation = 2.0 * std::sqrt(0.5 / b) * std::exp(-0.5);
      out.square_integrable = true;
      msg << "one-sided part of sqrt|x| with damping on its supported side";
      break;
    }
    case PayoffKind::SqrtAbs: {
      out.l1_finite = out.finite_variation = false;
      out.l1_norm = out.total_variation = kInf;
      out.square_integrable = true;
      msg << "sqrt|x| e^{-alpha x} is not integrable on both tails for any alpha; "
             "use the decomposition into sqrt(x v 0) and sqrt((-x) v 0)";
      break;
    }
    case PayoffKind::Polynomial: {
      const bool zero = std::all_of(payoff.coefficients().begin(),
                                    payoff.coefficients().end(),
                                    [](double c) { return c == 0.0; });
      out.l1_finite = out.finite_variation = zero;
      out.l1_norm = out.total_variation = zero ? 0.0 : kInf;
      out.square_integrable = zero || (interval.lower < 0.0 && interval.upper > 0.0);
      msg << (zero ? "zero payoff" : "polynomial: no damped transform on both tails; "
                                     "use the conditional-expectation representation");
      break;
    }
    case PayoffKind::Custom: {
      constexpr int n = 10000;
      const double support_lo = payoff.support_lo();
      const double support_hi = payoff.support_hi();
      double tv = 0.0, l1 = 0.0, prev = 0.0;
      const double h = (support_hi - support_lo) / n;
      for (int i = 0; i <= n; ++i) {
        const double x = support_lo + h * i;
        const double g = payoff(x) * std::exp(-a * x);
        if (i > 0) tv += std::abs(g - prev);
        l1 += (i == 0 || i == n ? 0.5 : 1.0) * std::abs(g) * h;
        prev = g;
      }
      tv += std::abs(prev);
      out.l1_norm = l1;
      out.total_variation = tv;
      out.l1_finite = std::isfinite(l1);
      out.finite_variation = std::isfinite(tv);
      out.square_integrable = std::isfinite(payoff.sup_norm());
      msg << "custom payoff: sampled L1 and total variation of f e^{-alpha x}";
      break;
    }
  }
  if (payoff.has_transform() && out.l1_finite) out.c_hat = damped_bound(payoff);
  out.passed = out.l1_finite && out.finite_variation && out.square_integrable;
  msg << "; L1 = " << out.l1_norm << ", TV = " << out.total_variation;
  if (payoff.has_transform() && out.l1_finite) msg << ", C^ = " << out.c_hat;
  out.diagnostic = msg.str();
  return out;
}

double default_alpha(PayoffKind kind, const LevyModel& model) {
  const auto iv = model_interval(model);
  switch (kind) {
    case PayoffKind::ExpIndicator:
      if (iv.contains(1.5)) return 1.5;
      if (iv.upper > 1.0) return 0.5 * (1.0 + iv.upper);
      throw DomainError("e^x 1{x>0} needs E[e^{alpha X}] < inf for some alpha > 1");
    case PayoffKind::SqrtAbsMinus:
      if (iv.contains(-1.0)) return -1.0;
      return 0.5 * iv.lower;
    case PayoffKind::Polynomial: return 0.0;
    default:
      if (iv.contains(1.0)) return 1.0;
      return 0.5 * iv.upper;
  }
}

}  // namespace levyrep
