#include "levyrep/jump_measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "levyrep/bessel.hpp"
#include "levyrep/errors.hpp"
#include "levyrep/quadrature.hpp"

namespace levyrep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this radius the Custom integrand is replaced by its 2nd-order
// Taylor expansion -z^2 x^2 / 2.

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double nig_gamma(const NigJumps& p) { return std::sqrt(p.a * p.a - p.b * p.b); }

// ---- tabulated helpers -----------------------------------------------------

double tab_density(const TabulatedJumps& t, double x) {
  const auto& k = t.knots;
  if (x < k.front() || x > k.back()) return 0.0;
  auto it = std::upper_bound(k.begin(), k.end(), x);
  std::size_t i = it == k.end() ? k.size() - 2
                                : static_cast<std::size_t>(it - k.begin()) - 1;
  if (i >= k.size() - 1) i = k.size() - 2;
  const double w = (x - k[i]) / (k[i + 1] - k[i]);
  return std::exp(t.log_density[i] + w * (t.log_density[i + 1] - t.log_density[i]));
}

// Integrates g(x) * density over the tabulated support, segment by segment,
// skipping (-eps, eps) when eps > 0.
template <class G>
auto tab_integrate(const TabulatedJumps& t, const G& g, double eps)
    -> decltype(g(0.0)) {
  using T = decltype(g(0.0));
  T total{};
  QuadratureOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-12;
  auto integrand = [&](double x) { return g(x) * tab_density(t, x); };
  for (std::size_t i = 0; i + 1 < t.knots.size(); ++i) {
    const double lo = t.knots[i];
    const double hi = t.knots[i + 1];
    if (eps > 0.0 && lo < eps && hi > -eps) {
      if (lo < -eps) total += integrate_adaptive(integrand, lo, -eps, opt).value;
      if (hi > eps) total += integrate_adaptive(integrand, eps, hi, opt).value;
    } else {
      total += integrate_adaptive(integrand, lo, hi, opt).value;
    }
  }
  return total;
}

// (e^q - 1) / q and int_0^1 r e^{q r} dr, with series near q = 0.
cplx phi1(cplx q) {
  if (std::abs(q) < 1e-4) return 1.0 + q * (0.5 + q / 6.0);
  return (std::exp(q) - 1.0) / q;
}
cplx phi2(cplx q) {
  if (std::abs(q) < 1e-4) return 0.5 + q * (1.0 / 3.0 + q / 8.0);
  return (std::exp(q) * (q - 1.0) + 1.0) / (q * q);
}

// Segment by segment closed form: on [x_i, x_i + d] the density is
// A e^{s (x - x_i)}, so every integral against e^{izx} is elementary.
cplx tab_exponent(const TabulatedJumps& t, cplx z) {
  const cplx iz(-z.imag(), z.real());
  cplx total{};
  for (std::size_t i = 0; i + 1 < t.knots.size(); ++i) {
    const double x0 = t.knots[i];
    const double d = t.knots[i + 1] - x0;
    const double s = (t.log_density[i + 1] - t.log_density[i]) / d;
    const double A = std::exp(t.log_density[i]);
    const cplx e_iz = A * d * std::exp(iz * x0) * phi1((iz + s) * d);
    const double e0 = A * d * phi1(cplx(s * d)).real();
    const double e1 = x0 * e0 + A * d * d * phi2(cplx(s * d)).real();
    total += e_iz - e0 - iz * e1;
  }
  return total;
}

// ---- per-component formulas ------------------------------------------------

double merton_moment(const MertonJumps& p, int n) {
  const double m = p.mean;
  const double s2 = p.stdev * p.stdev;
  switch (n) {
    case 1: return p.intensity * m;
    case 2: return p.intensity * (m * m + s2);
    case 3: return p.intensity * (m * m * m + 3.0 * m * s2);
    case 4: return p.intensity * (m * m * m * m + 6.0 * m * m * s2 + 3.0 * s2 * s2);
    default: break;
  }
  throw ParameterError("moment order must be in 1..4");
}

double vg_moment(const VgJumps& p, int n) {
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return p.c * fact * (std::pow(p.m, -n) + sign * std::pow(p.g, -n));
}

double nig_moment(const NigJumps& p, int n) {
  const double g = nig_gamma(p);
  const double a2 = p.a * p.a;
  switch (n) {
    case 2: return p.delta * a2 / std::pow(g, 3);
    case 3: return 3.0 * p.delta * a2 * p.b / std::pow(g, 5);
    case 4: return 3.0 * p.delta * a2 * (a2 + 4.0 * p.b * p.b) / std::pow(g, 7);
    default: break;
  }
  throw ParameterError("NIG moment order must be in 2..4");
}

double component_cgf(const JumpComponent& c, double theta) {
  return std::visit(
      overloaded{
          [&](const MertonJumps& p) {
            return p.intensity * (std::exp(theta * p.mean + 0.5 * theta * theta *
                                                                p.stdev * p.stdev) -
                                  1.0 - theta * p.mean);
          },
          [&](const VgJumps& p) {
            return -p.c * std::log1p(-theta / p.m) - p.c * std::log1p(theta / p.g) -
                   theta * p.c * (1.0 / p.m - 1.0 / p.g);
          },
          [&](const NigJumps& p) {
            const double g = nig_gamma(p);
            const double bt = p.b + theta;
            return p.delta * (g - std::sqrt(p.a * p.a - bt * bt)) -
                   theta * p.delta * p.b / g;
          },
          [&](const TabulatedJumps& p) {
            return tab_integrate(
                p,
                [&](double x) { return std::expm1(theta * x) - theta * x; }, 0.0);
          }},
      c);
}

double component_cgf_derivative(const JumpComponent& c, double theta) {
  return std::visit(
      overloaded{
          [&](const MertonJumps& p) {
            const double s2 = p.stdev * p.stdev;
            return p.intensity * ((p.mean + theta * s2) *
                                      std::exp(theta * p.mean + 0.5 * theta * theta * s2) -
                                  p.mean);
          },
          [&](const VgJumps& p) {
            return p.c / (p.m - theta) - p.c / (p.g + theta) - p.c / p.m + p.c / p.g;
          },
          [&](const NigJumps& p) {
            const double bt = p.b + theta;
            return p.delta * bt / std::sqrt(p.a * p.a - bt * bt) -
                   p.delta * p.b / nig_gamma(p);
          },
          [&](const TabulatedJumps& p) {
            return tab_integrate(p, [&](double x) { return x * std::expm1(theta * x); },
                                 0.0);
          }},
      c);
}

}  // namespace

// ---- free functions --------------------------------------------------------

void validate(const JumpComponent& component) {
  std::visit(
      overloaded{
          [](const MertonJumps& p) {
            if (!(p.intensity > 0.0) || !(p.stdev > 0.0) || !std::isfinite(p.mean))
              throw ParameterError("Merton jumps need intensity > 0, stdev > 0");
          },
          [](const VgJumps& p) {
            if (!(p.c > 0.0) || !(p.g > 0.0) || !(p.m > 0.0))
              throw ParameterError("VG jumps need C, G, M > 0");
          },
          [](const NigJumps& p) {
            if (!(p.a > 0.0) || !(p.delta > 0.0) || !(std::abs(p.b) < p.a))
              throw ParameterError("NIG jumps need a > 0, |b| < a, delta > 0");
          },
          [](const TabulatedJumps& p) {
            if (p.knots.size() < 2 || p.knots.size() != p.log_density.size())
              throw ParameterError(
                  "tabulated density needs >= 2 knots and one log-density per knot");
            for (std::size_t i = 0; i < p.knots.size(); ++i) {
              if (!std::isfinite(p.knots[i]) || !std::isfinite(p.log_density[i]))
                throw ParameterError("tabulated density has non-finite entries");
              if (i > 0 && !(p.knots[i] > p.knots[i - 1]))
                throw ParameterError("tabulated knots must be strictly increasing");
            }
          }},
      component);
}

double component_density(const JumpComponent& component, double x) {
  if (x == 0.0) return 0.0;
  return std::visit(
      overloaded{
          [&](const MertonJumps& p) {
            const double u = (x - p.mean) / p.stdev;
            return p.intensity / (std::sqrt(2.0 * std::numbers::pi) * p.stdev) *
                   std::exp(-0.5 * u * u);
          },
          [&](const VgJumps& p) {
            return x < 0.0 ? p.c * std::exp(p.g * x) / -x
                           : p.c * std::exp(-p.m * x) / x;
          },
          [&](const NigJumps& p) {
            const double ax = p.a * std::abs(x);
            // e^{bx} K1(a|x|) = e^{bx - a|x|} * (e^{a|x|} K1(a|x|))
            return p.delta * p.a / std::numbers::pi *
                   std::exp(p.b * x - ax) * bessel_k1_scaled(ax) / std::abs(x);
          },
          [&](const TabulatedJumps& p) { return tab_density(p, x); }},
      component);
}

MomentInterval component_interval(const JumpComponent& component) {
  return std::visit(
      overloaded{
          [](const MertonJumps&) { return MomentInterval{-kInf, kInf}; },
          [](const VgJumps& p) { return MomentInterval{-p.g, p.m}; },
          [](const NigJumps& p) { return MomentInterval{-p.a - p.b, p.a - p.b}; },
          [](const TabulatedJumps&) { return MomentInterval{-kInf, kInf}; }},
      component);
}

cplx component_exponent(const JumpComponent& component, cplx z) {
  const cplx iz(-z.imag(), z.real());
  return std::visit(
      overloaded{
          [&](const MertonJumps& p) {
            const double s2 = p.stdev * p.stdev;
            return p.intensity *
                   (std::exp(iz * p.mean - 0.5 * s2 * z * z) - 1.0 - iz * p.mean);
          },
          [&](const VgJumps& p) {
            return -p.c * std::log(1.0 - iz / p.m) - p.c * std::log(1.0 + iz / p.g) -
                   iz * p.c * (1.0 / p.m - 1.0 / p.g);
          },
          [&](const NigJumps& p) {
            const double g = nig_gamma(p);
            const cplx bz = p.b + iz;
            return p.delta * (g - std::sqrt(p.a * p.a - bz * bz)) -
                   iz * (p.delta * p.b / g);
          },
          [&](const TabulatedJumps& p) { return tab_exponent(p, z); }},
      component);
}

// ---- JumpMeasure -------------------------------------------------------------

JumpMeasure::JumpMeasure(std::vector<JumpComponent> components)
    : components_(std::move(components)) {
  for (const auto& c : components_) validate(c);
}

double JumpMeasure::density(double x) const {
  double d = 0.0;
  for (const auto& c : components_) d += component_density(c, x);
  return d;
}

cplx JumpMeasure::exponent(cplx z) const {
  if (components_.empty()) return {0.0, 0.0};
  const double theta = -z.imag();
  if (theta != 0.0 && !exponential_moment_interval().contains(theta)) {
    throw DomainError("exponential moment diverges at Im(z) = " +
                      std::to_string(z.imag()));
  }
  cplx total(0.0, 0.0);
  for (const auto& c : components_) total += component_exponent(c, z);
  return total;
}

double JumpMeasure::cumulant_generating(double theta) const {
  if (components_.empty()) return 0.0;
  if (theta != 0.0 && !exponential_moment_interval().contains(theta))
    throw DomainError("exponential moment diverges at theta = " + std::to_string(theta));
  double total = 0.0;
  for (const auto& c : components_) total += component_cgf(c, theta);
  return total;
}

double JumpMeasure::cumulant_generating_derivative(double theta) const {
  if (components_.empty()) return 0.0;
  if (theta != 0.0 && !exponential_moment_interval().contains(theta))
    throw DomainError("exponential moment diverges at theta = " + std::to_string(theta));
  double total = 0.0;
  for (const auto& c : components_) total += component_cgf_derivative(c, theta);
  return total;
}

double JumpMeasure::moment(int n) const {
  if (n < 2 || n > 4) throw ParameterError("moment order must be in 2..4");
  double total = 0.0;
  for (const auto& c : components_) {
    total += std::visit(
        overloaded{
            [&](const MertonJumps& p) { return merton_moment(p, n); },
            [&](const VgJumps& p) { return vg_moment(p, n); },
            [&](const NigJumps& p) { return nig_moment(p, n); },
            [&](const TabulatedJumps& p) {
              return tab_integrate(p, [&](double x) { return std::pow(x, n); }, 0.0);
            }},
        c);
  }
  return total;
}

MomentInterval JumpMeasure::exponential_moment_interval() const {
  MomentInterval out{-kInf, kInf};
  for (const auto& c : components_) {
    const auto ci = component_interval(c);
    out.lower = std::max(out.lower, ci.lower);
    out.upper = std::min(out.upper, ci.upper);
  }
  return out;
}

bool JumpMeasure::finite_activity() const {
  return std::all_of(components_.begin(), components_.end(), [](const auto& c) {
    return std::holds_alternative<MertonJumps>(c) ||
           std::holds_alternative<TabulatedJumps>(c);
  });
}

double JumpMeasure::intensity() const {
  if (!finite_activity()) return kInf;
  double total = 0.0;
  for (const auto& c : components_) {
    if (const auto* m = std::get_if<MertonJumps>(&c)) {
      total += m->intensity;
    } else if (const auto* t = std::get_if<TabulatedJumps>(&c)) {
      total += tab_integrate(*t, [](double) { return 1.0; }, 0.0);
    }
  }
  return total;
}

bool JumpMeasure::finite_variation() const {
  return std::none_of(components_.begin(), components_.end(),
                      [](const auto& c) { return std::holds_alternative<NigJumps>(c); });
}

JumpMeasure JumpMeasure::scaled(double factor) const {
  if (factor < 0.0) throw ParameterError("a Levy measure cannot be scaled negatively");
  if (factor == 0.0) return JumpMeasure{};
  std::vector<JumpComponent> out;
  out.reserve(components_.size());
  const double log_factor = std::log(factor);
  for (const auto& c : components_) {
    out.push_back(std::visit(
        overloaded{
            [&](MertonJumps p) -> JumpComponent {
              p.intensity *= factor;
              return p;
            },
            [&](VgJumps p) -> JumpComponent {
              p.c *= factor;
              return p;
            },
            [&](NigJumps p) -> JumpComponent {
              p.delta *= factor;
              return p;
            },
            [&](TabulatedJumps p) -> JumpComponent {
              for (auto& l : p.log_density) l += log_factor;
              return p;
            }},
        c));
  }
  return JumpMeasure(std::move(out));
}

JumpMeasure JumpMeasure::esscher(double theta) const {
  if (theta == 0.0) return *this;
  if (!exponential_moment_interval().contains(theta))
    throw DomainError("Esscher tilt outside the exponential moment interval");
  std::vector<JumpComponent> out;
  out.reserve(components_.size());
  for (const auto& c : components_) {
    out.push_back(std::visit(
        overloaded{
            [&](MertonJumps p) -> JumpComponent {
              const double s2 = p.stdev * p.stdev;
              p.intensity *= std::exp(theta * p.mean + 0.5 * theta * theta * s2);
              p.mean += theta * s2;
              return p;
            },
            [&](VgJumps p) -> JumpComponent {
              p.g += theta;
              p.m -= theta;
              return p;
            },
            [&](NigJumps p) -> JumpComponent {
              p.b += theta;
              return p;
            },
            [&](TabulatedJumps p) -> JumpComponent {
              for (std::size_t i = 0; i < p.knots.size(); ++i)
                p.log_density[i] += theta * p.knots[i];
              return p;
            }},
        c));
  }
  return JumpMeasure(std::move(out));
}

JumpMeasure JumpMeasure::operator+(const JumpMeasure& other) const {
  std::vector<JumpComponent> out = components_;
  out.insert(out.end(), other.components_.begin(), other.components_.end());
  return JumpMeasure(std::move(out));
}

}  // namespace levyrep
