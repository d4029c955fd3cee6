#include "levyrep/mmm.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "levyrep/errors.hpp"
#include "levyrep/representation.hpp"

namespace levyrep {

namespace {

struct Moments {
  bool c2_finite = true;
  double c2 = 0.0;
  double kappa1 = 0.0;
};

Moments jump_moments(const JumpMeasure& nu) {
  Moments m;
  if (nu.empty()) return m;
  if (!(nu.exponential_moment_interval().upper > 2.0)) {
    m.c2_finite = false;
    m.c2 = std::numeric_limits<double>::infinity();
    return m;
  }
  m.kappa1 = nu.cumulant_generating(1.0);
  // (e^x - 1)^2 = (e^{2x} - 1 - 2x) - 2 (e^x - 1 - x)
  m.c2 = nu.cumulant_generating(2.0) - 2.0 * m.kappa1;
  return m;
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

}  // namespace

void MarketSpec::validate() const {
  if (!std::isfinite(r) || r < 0.0) throw ParameterError("interest rate must be finite and >= 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("maturity must be positive");
  if (!(K > 0.0) || !std::isfinite(K)) throw ParameterError("strike must be positive");
}

double MarketSpec::log_threshold() const { return std::log(K) - r * T; }

double MmmTransform::star_density_factor(double x) const { return 1.0 - k * std::expm1(x); }

MmmTransform build_mmm(const MarketSpec& market) {
  market.validate();
  const auto& model = market.model;
  const auto& nu = model.jumps();
  const auto mom = jump_moments(nu);
  if (!mom.c2_finite)
    throw AssumptionError("C2 = int (e^x - 1)^2 nu(dx) is infinite (no exponential moment of order 2)");
  MmmTransform out;
  out.physical = model;
  out.c2 = mom.c2;
  const double s2 = model.sigma() * model.sigma();
  out.mu_hat = model.mu() + 0.5 * s2 + mom.kappa1;
  // mu = -sigma^2/2 etc. should land on 0, not on rounding noise
  if (std::abs(out.mu_hat) < 1e-14) out.mu_hat = 0.0;
  const double denom = s2 + out.c2;
  if (!(denom > 0.0)) throw AssumptionError("sigma^2 + C2 = 0: the price has no martingale part");
  if (out.mu_hat > 0.0)
    throw AssumptionError("mu^ = " + num(out.mu_hat) + " violates 0 >= mu^");
  if (!(out.mu_hat > -denom))
    throw AssumptionError("mu^ = " + num(out.mu_hat) + " violates mu^ > -sigma^2 - C2 = " +
                          num(-denom));
  out.k = out.mu_hat / denom;
  out.girsanov_w = out.k * model.sigma();

  JumpMeasure star_nu;
  if (!nu.empty()) {
    if (1.0 + out.k > 0.0) star_nu = nu.scaled(1.0 + out.k);
    if (out.k != 0.0) star_nu = star_nu + nu.esscher(1.0).scaled(-out.k);
  }
  const double kd = nu.empty() ? 0.0 : nu.cumulant_generating_derivative(1.0);
  out.mu_star = model.mu() - out.k * s2 - out.k * kd;
  out.star = LevyModel(ModelKind::MinimalMartingale, model.x0(), out.mu_star, model.sigma(),
                       std::move(star_nu));

  const cplx m = out.star.psi(cplx(0.0, -1.0));
  if (std::abs(m) > 1e-8)
    throw Error("martingale condition psi*(-i) = 0 failed (|psi*(-i)| = " + num(std::abs(m)) + ")");
  return out;
}

EngineResult density_star(const MmmTransform& mmm, const QuadratureGrid& grid, double t,
                          double T, double y) {
  return density(mmm.star, grid, t, T, y);
}

double mmm_log_density(const MmmTransform& mmm, const PathSimulator& simulator,
                       const PathRecord& path) {
  if (path.measure != Measure::Physical)
    throw SchemeError("the density is evaluated on physical paths");
  if (simulator.has_unmarked_part())
    throw SchemeError("the density needs jump marks; disable exact increments");
  const double k = mmm.k;
  if (k == 0.0) return 0.0;
  const double sigma = mmm.physical.sigma();
  const double T = path.times.back() - path.times.front();
  double log_z = -k * sigma * path.w_total() - 0.5 * k * k * sigma * sigma * T;
  const double se2 = simulator.small_jump_variance();
  if (se2 > 0.0) log_z += -k * path.small_jump_total() - 0.5 * k * k * se2 * T;
  for (const auto& j : path.jumps) {
    const double f = mmm.star_density_factor(j.size);
    if (!(f > 0.0))
      throw DomainError("density factor 1 - k(e^y - 1) <= 0 at jump y = " + num(j.size));
    log_z += std::log(f);
  }
  log_z += k * T * simulator.marked_exp_mean();
  return log_z;
}

std::string Assumption3Check::failed_part() const {
  if (!c2_finite) return "C2";
  if (!mu_hat_ok) return "mu_hat";
  if (!moment_ok) return "moment";
  if (decay_inconclusive) return "decay (inconclusive)";
  if (!decay_ok) return "decay";
  return "";
}

Assumption3Check check_assumption3(const MarketSpec& market, double alpha) {
  market.validate();
  Assumption3Check out;
  out.alpha = alpha;
  const auto& model = market.model;
  const auto mom = jump_moments(model.jumps());
  out.c2_finite = mom.c2_finite;
  out.c2 = mom.c2;
  if (!out.c2_finite) {
    out.notes.push_back("C2 infinite: nu has no exponential moment of order 2");
    return out;
  }
  const double s2 = model.sigma() * model.sigma();
  out.mu_hat = model.mu() + 0.5 * s2 + mom.kappa1;
  if (std::abs(out.mu_hat) < 1e-14) out.mu_hat = 0.0;
  out.mu_hat_ok = out.mu_hat <= 0.0 && out.mu_hat > -s2 - out.c2;
  if (!out.mu_hat_ok) {
    out.notes.push_back("mu^ = " + num(out.mu_hat) + " outside (" + num(-s2 - out.c2) + ", 0]");
    return out;
  }
  const MmmTransform mmm = build_mmm(market);
  const auto& star_nu = mmm.nu_star();
  out.moment_ok = alpha >= 1.0 &&
                  (star_nu.empty() || star_nu.exponential_moment_interval().contains(alpha));
  if (!out.moment_ok) {
    out.notes.push_back("alpha = " + num(alpha) + " fails alpha >= 1 or the moment condition under nu*");
    return out;
  }
  // A definite failure at any sampled time outranks an inconclusive one.
  bool failed = false, inconclusive = false;
  for (double frac : {0.0, 0.5, 0.9, 0.99}) {
    const double t = frac * market.T;
    try {
      const auto d = check_decay_condition(mmm.star, alpha, t, market.T);
      if (!d.passed) {
        failed = true;
        out.notes.push_back("decay fails at t = " + num(t) + ": " + d.diagnostic);
      }
    } catch (const InconclusiveError& e) {
      inconclusive = true;
      out.notes.push_back(std::string("decay inconclusive at t = ") + num(t) + ": " + e.what());
    }
  }
  out.decay_ok = !failed && !inconclusive;
  out.decay_inconclusive = inconclusive && !failed;
  out.passed = out.decay_ok;
  return out;
}

}  // namespace levyrep
