#include "levyrep/fourier_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "levyrep/errors.hpp"
#include "levyrep/quadrature.hpp"

namespace levyrep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kI(0.0, 1.0);

double strip_distance(const LevyModel& model, double alpha) {
  if (model.jumps().empty()) return kInf;
  const auto iv = model.jumps().exponential_moment_interval();
  return std::min(iv.upper - alpha, alpha - iv.lower);
}

void require_moment(const LevyModel& model, double alpha) {
  if (alpha == 0.0 || model.jumps().empty()) return;
  if (!model.jumps().exponential_moment_interval().contains(alpha))
    throw DomainError("E[exp(alpha X_1)] diverges for alpha = " + std::to_string(alpha));
}

// Smallest interval outside of which the Levy density, weighted by max(1, y^2),
// is negligible. Assumes unimodal tails.
std::pair<double, double> jump_support(const JumpMeasure& jumps) {
  auto reach = [&](double sign) {
    double y = 0.25;
    for (int k = 0; k < 400; ++k, y *= 1.1) {
      const double d = jumps.density(sign * y);
      if (y > 1.0 && d * y * y < 1e-16) return y;
    }
    return y;
  };
  return {-reach(-1.0), reach(1.0)};
}

}  // namespace

std::string to_string(QuadratureRule rule) {
  return rule == QuadratureRule::UniformSimpson ? "uniform_simpson" : "gauss_legendre_panels";
}

QuadratureRule parse_rule(const std::string& name) {
  if (name == "uniform_simpson" || name == "uniform" || name == "simpson")
    return QuadratureRule::UniformSimpson;
  if (name == "gauss_legendre_panels" || name == "gauss_legendre" || name == "gl")
    return QuadratureRule::GaussLegendrePanels;
  throw ConfigError("unknown quadrature rule '" + name + "'");
}

void QuadratureGrid::validate() const {
  if (!std::isfinite(alpha)) throw ParameterError("grid alpha must be finite");
  if (n_nodes < 64 || n_nodes % 2 != 0)
    throw ParameterError("grid n_nodes must be even and >= 64");
  if (!(envelope_tol > 0.0) || !(v_cap > 0.0))
    throw ParameterError("grid tolerances must be positive");
}

EngineResult ContourNodes::apply(const Multiplier& m) const {
  std::vector<cplx> values(w_.size());
  for (std::size_t k = 0; k < w_.size(); ++k) values[k] = m(w_[k]);
  return apply(values);
}

EngineResult ContourNodes::apply(const std::vector<cplx>& m) const {
  cplx sum{};
  double abs_sum = 0.0;
  for (std::size_t k = 0; k < w_.size(); ++k) {
    const cplx term = weight_[k] * base_[k] * m[k];
    sum += term;
    abs_sum += std::abs(term);
  }
  EngineResult r;
  r.value = sum.real();
  r.imag_residual = std::abs(sum.imag());
  r.err_estimate = tail_ + 1e-15 * abs_sum + r.imag_residual;
  r.v_max = v_max_;
  r.n_nodes = static_cast<int>(w_.size());
  return r;
}

ContourNodes ContourNodes::build(const std::function<cplx(cplx)>& base,
                                 const std::function<cplx(cplx)>& psi_at,
                                 const QuadratureGrid& grid, double omega, double singularity,
                                 double envelope_power) {
  grid.validate();
  ContourNodes out;
  const double alpha = grid.alpha;
  out.alpha_ = alpha;
  auto envelope = [&](double v) {
    const cplx w(v, alpha);
    return std::abs(base(w)) * std::pow(1.0 + std::abs(w), envelope_power);
  };

  double peak = envelope(0.0);
  double V = 1.0;
  if (grid.v_max > 0.0) {
    V = grid.v_max;
  } else {
    bool done = false;
    while (V <= grid.v_cap) {
      const double e = envelope(V);
      peak = std::max(peak, e);
      if (e <= grid.envelope_tol * peak && envelope(1.25 * V) <= grid.envelope_tol * peak) {
        done = true;
        break;
      }
      V *= 1.25;
    }
    if (!done) V = grid.v_cap;
  }
  {
    const double eV = envelope(V);
    const double ePrev = envelope(V / 1.25);
    double tail = 0.0;
    if (eV > 0.0) {
      const double p = std::log(ePrev / eV) / std::log(1.25);
      tail = p > 1.0 ? 2.0 * eV * V / std::max(p - 1.0, 1.0) : kInf;
    }
    out.tail_ = tail / kTwoPi;
    if (grid.v_max <= 0.0 && !(out.tail_ <= 1e-8 * std::max(1.0, peak))) {
      throw TruncationError("integrand envelope has not decayed at the truncation cap v = " +
                            std::to_string(V) + " (tail estimate " +
                            std::to_string(out.tail_) + ")");
    }
  }
  out.v_max_ = V;

  std::vector<double> v_pos, w_pos;  // v > 0 nodes and their weights
  double w_zero = 0.0;
  const double omega_eff = std::max(omega, 1e-3);
  if (grid.rule == QuadratureRule::GaussLegendrePanels) {
    const auto& rule = gauss_legendre(16);
    double wmax = std::min({V / 8.0, 12.0 / omega_eff, 2.0 * V * 16.0 / grid.n_nodes});
    const double d = std::isfinite(singularity) && singularity > 0.0 ? singularity : wmax;
    double width = std::min(std::max(d, 1e-6), wmax);
    double left = 0.0;
    while (left < V) {
      const double right = std::min(left + width, V);
      const double c = 0.5 * (left + right);
      const double h = 0.5 * (right - left);
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        v_pos.push_back(c + h * rule.nodes[j]);
        w_pos.push_back(h * rule.weights[j]);
      }
      left = right;
      width = std::min(2.0 * width, wmax);
    }
  } else {
    const double d = std::isfinite(singularity) && singularity > 0.0 ? singularity : 1.0;
    const double h_target = std::min({0.25 / omega_eff, 0.1 * std::min(d, 1.0), 2.0 * V / grid.n_nodes});
    int m = static_cast<int>(std::ceil(V / h_target));
    if (m % 2 != 0) ++m;
    const double h = V / m;
    w_zero = h / 3.0;
    for (int k = 1; k <= m; ++k) {
      v_pos.push_back(k * h);
      const double s = (k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      w_pos.push_back(s * h / 3.0);
    }
  }

  const std::size_t n = v_pos.size();
  out.w_.reserve(2 * n + 1);
  out.weight_.reserve(2 * n + 1);
  auto push = [&](double v, double weight) {
    const cplx w(v, alpha);
    out.w_.push_back(w);
    out.weight_.push_back(weight / kTwoPi);
    out.base_.push_back(base(w));
    out.psi_.push_back(psi_at ? psi_at(w) : cplx{});
  };
  if (w_zero > 0.0) push(0.0, w_zero);
  for (std::size_t k = 0; k < n; ++k) {
    push(v_pos[k], w_pos[k]);
    push(-v_pos[k], w_pos[k]);
  }
  return out;
}

ContourNodes value_nodes(const LevyModel& model, const DampedPayoff& payoff,
                         const QuadratureGrid& grid, double t, double x, double T,
                         double y_reach) {
  if (!(t < T)) throw DomainError("Fourier evaluation needs t < T");
  if (!payoff.has_transform())
    throw DomainError(to_string(payoff.kind()) + " payoff has no damped transform");
  require_moment(model, grid.alpha);
  const double tau = T - t;
  auto psi_at = [&](cplx w) { return model.psi(-w); };
  auto base = [&](cplx w) { return payoff.transform(x, w) * std::exp(tau * model.psi(-w)); };
  const double omega = std::abs(x - payoff.phase_center()) + std::abs(model.mu()) * tau + y_reach + 2.0;
  const double sing = std::min(payoff.with_alpha(grid.alpha).singularity_distance(),
                               strip_distance(model, grid.alpha));
  return ContourNodes::build(base, psi_at, grid, omega, sing);
}

namespace multiplier {
cplx dx(cplx w) { return -kI * w; }
cplx dxx(cplx w) { return -w * w; }
cplx jump(cplx w, double y) { return std::exp(-kI * w * y) - 1.0; }
cplx compensated_jump(cplx w, double y) { return std::exp(-kI * w * y) - 1.0 + kI * w * y; }
}  // namespace multiplier

namespace {

void require_before_maturity(double t, double T) {
  if (!(t < T)) throw DomainError("derivatives of F need t < T");
}

}  // namespace

EngineResult conditional_value(const LevyModel& model, const DampedPayoff& payoff,
                               const QuadratureGrid& grid, double t, double x, double T) {
  if (t >= T) {
    EngineResult r;
    r.value = payoff(x);
    return r;
  }
  return value_nodes(model, payoff, grid, t, x, T).apply([](cplx) { return cplx(1.0); });
}

EngineResult dF_dx(const LevyModel& model, const DampedPayoff& payoff,
                   const QuadratureGrid& grid, double t, double x, double T) {
  require_before_maturity(t, T);
  return value_nodes(model, payoff, grid, t, x, T).apply(multiplier::dx);
}

EngineResult d2F_dx2(const LevyModel& model, const DampedPayoff& payoff,
                     const QuadratureGrid& grid, double t, double x, double T) {
  require_before_maturity(t, T);
  return value_nodes(model, payoff, grid, t, x, T).apply(multiplier::dxx);
}

EngineResult dF_dt(const LevyModel& model, const DampedPayoff& payoff,
                   const QuadratureGrid& grid, double t, double x, double T) {
  require_before_maturity(t, T);
  const auto nodes = value_nodes(model, payoff, grid, t, x, T);
  std::vector<cplx> m(nodes.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = -nodes.psi()[k];
  return nodes.apply(m);
}

EngineResult jump_difference(const LevyModel& model, const DampedPayoff& payoff,
                             const QuadratureGrid& grid, double t, double x, double y,
                             double T) {
  if (std::abs(grid.alpha * y) > 40.0)
    throw DomainError("jump size outside the validated range |alpha y| <= 40");
  if (y == 0.0) return {};
  if (t >= T) {
    EngineResult r;
    r.value = payoff(x + y) - payoff(x);
    return r;
  }
  return value_nodes(model, payoff, grid, t, x, T, std::abs(y))
      .apply([y](cplx w) { return multiplier::jump(w, y); });
}

EngineResult jump_generator(const LevyModel& model, const DampedPayoff& payoff,
                            const QuadratureGrid& grid, double t, double x, double T) {
  require_before_maturity(t, T);
  if (model.jumps().empty()) return {};
  const auto& jumps = model.jumps();
  return value_nodes(model, payoff, grid, t, x, T)
      .apply([&](cplx w) { return jumps.exponent(-w); });
}

PideResidual pide_residual(const LevyModel& model, const DampedPayoff& payoff,
                           const QuadratureGrid& grid, double t, double x, double T,
                           PideMode mode) {
  require_before_maturity(t, T);
  PideResidual out;
  const auto& jumps = model.jumps();
  std::pair<double, double> support{0.0, 0.0};
  if (mode == PideMode::DirectQuadrature && !jumps.empty()) {
    support = jump_support(jumps);
    const double limit = 40.0 / std::abs(grid.alpha);
    support.first = std::max(support.first, -limit);
    support.second = std::min(support.second, limit);
  }
  const double reach = std::max(-support.first, support.second);
  const auto nodes = value_nodes(model, payoff, grid, t, x, T, reach);

  std::vector<cplx> m(nodes.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = -nodes.psi()[k];
  const auto ft = nodes.apply(m);
  const auto fx = nodes.apply(multiplier::dx);
  const auto fxx = nodes.apply(multiplier::dxx);
  out.dF_dt = ft.value;
  out.dF_dx = fx.value;
  out.d2F_dx2 = fxx.value;
  out.err_estimate = ft.err_estimate + std::abs(model.mu()) * fx.err_estimate +
                     0.5 * model.sigma() * model.sigma() * fxx.err_estimate;

  if (!jumps.empty()) {
    if (mode == PideMode::FourierCompensated) {
      const auto j = nodes.apply([&](cplx w) { return jumps.exponent(-w); });
      out.jump_term = j.value;
      out.err_estimate += j.err_estimate;
    } else {
      QuadratureOptions opt;
      opt.abs_tol = 1e-11;
      opt.rel_tol = 1e-10;
      const double fx_v = fx.value;
      auto integrand = [&](double y) {
        if (y == 0.0) return 0.0;
        const double d = nodes.apply([y](cplx w) { return multiplier::jump(w, y); }).value;
        return (d - y * fx_v) * jumps.density(y);
      };
      const double eps0 = jumps.finite_activity() ? 0.0 : 1e-3;
      double total = 0.0, err = 0.0;
      if (eps0 == 0.0) {
        auto a = integrate_adaptive(integrand, support.first, 0.0, opt);
        auto b = integrate_adaptive(integrand, 0.0, support.second, opt);
        total = a.value + b.value;
        err = a.error + b.error;
      } else {
        auto a = integrate_adaptive(integrand, support.first, -eps0, opt);
        auto b = integrate_adaptive(integrand, eps0, support.second, opt);
        // Second-order Taylor expansion below eps0.
        auto y2 = [&](double y) { return y * y * jumps.density(y); };
        const double small = integrate_adaptive(y2, -eps0, 0.0, opt).value +
                             integrate_adaptive(y2, 0.0, eps0, opt).value;
        total = a.value + b.value + 0.5 * fxx.value * small;
        err = a.error + b.error;
      }
      out.jump_term = total;
      out.err_estimate += err;
    }
  }
  out.residual = out.dF_dt + model.mu() * out.dF_dx +
                 0.5 * model.sigma() * model.sigma() * out.d2F_dx2 + out.jump_term;
  return out;
}

EngineResult density(const LevyModel& model, const QuadratureGrid& grid, double t, double T,
                     double y) {
  if (!(t < T)) throw DomainError("density of X_T - X_t needs t < T");
  const double tau = T - t;
  QuadratureGrid g = grid;
  g.alpha = 0.0;
  auto base = [&](cplx w) { return std::exp(-kI * w * y + tau * model.psi(w)); };
  const double omega = std::abs(y) + std::abs(model.mu()) * tau + 2.0;
  auto nodes = ContourNodes::build(base, nullptr, g, omega, strip_distance(model, 0.0), 0.0);
  auto r = nodes.apply([](cplx) { return cplx(1.0); });
  if (r.value < 0.0 && r.value > -1e-10) r.value = 0.0;
  return r;
}

ExpIndicatorValue exp_indicator_F(const LevyModel& model, double t, double x, double T,
                                  const QuadratureGrid& grid) {
  QuadratureGrid g = grid;
  if (!(g.alpha > 1.0)) g.alpha = default_alpha(PayoffKind::ExpIndicator, model);
  const auto payoff = DampedPayoff::exp_indicator(g.alpha);
  ExpIndicatorValue out;
  const auto f = conditional_value(model, payoff, g, t, x, T);
  const auto p = density(model, g, t, T, -x);
  out.value = f.value;
  out.derivative = f.value + p.value;
  out.err_estimate = f.err_estimate + p.err_estimate;
  return out;
}

LatticeSlice::LatticeSlice(const std::function<cplx(cplx)>& base_at_zero, double alpha,
                           double window, const std::vector<Multiplier>& ops, double tol,
                           double v_cap)
    : alpha_(alpha), h_(kTwoPi / window) {
  if (ops.empty()) throw ParameterError("lattice needs at least one operation");
  auto envelope = [&](double v) {
    const cplx w(v, alpha);
    double m = 0.0;
    for (const auto& op : ops) m = std::max(m, std::abs(op(w)));
    return std::abs(base_at_zero(w)) * std::max(m, 1.0);
  };
  double peak = envelope(0.0);
  double V = 1.0;
  while (true) {
    const double e = envelope(V);
    peak = std::max(peak, e);
    if (e <= tol * peak && envelope(1.25 * V) <= tol * peak) break;
    V *= 1.25;
    if (V > v_cap)
      throw TruncationError("lattice envelope has not decayed at v = " + std::to_string(v_cap));
  }
  nodes_ = static_cast<std::size_t>(std::ceil(V / h_)) + 1;
  re_.assign(ops.size(), std::vector<double>(nodes_));
  im_.assign(ops.size(), std::vector<double>(nodes_));
  for (std::size_t k = 0; k < nodes_; ++k) {
    const cplx w(k * h_, alpha);
    const cplx b = base_at_zero(w) * ((k == 0 ? 1.0 : 2.0) * h_ / kTwoPi);
    for (std::size_t op = 0; op < ops.size(); ++op) {
      const cplx c = b * ops[op](w);
      re_[op][k] = c.real();
      im_[op][k] = c.imag();
    }
  }
}

void LatticeSlice::evaluate(const double* xs, std::size_t n, double* out) const {
  constexpr std::size_t kBlock = 64;
  constexpr std::size_t kResync = 512;
  const std::size_t nops = re_.size();
  double C[kBlock], S[kBlock], cr[kBlock], sr[kBlock];
  std::vector<double> acc(nops * kBlock);
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t m = std::min(kBlock, n - start);
    for (std::size_t j = 0; j < m; ++j) {
      cr[j] = std::cos(h_ * xs[start + j]);
      sr[j] = std::sin(h_ * xs[start + j]);
      C[j] = 1.0;
      S[j] = 0.0;
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < nodes_; ++k) {
      if (k > 0) {
        if (k % kResync == 0) {
          for (std::size_t j = 0; j < m; ++j) {
            const double th = static_cast<double>(k) * h_ * xs[start + j];
            C[j] = std::cos(th);
            S[j] = std::sin(th);
          }
        } else {
          for (std::size_t j = 0; j < m; ++j) {
            const double c = C[j] * cr[j] - S[j] * sr[j];
            S[j] = S[j] * cr[j] + C[j] * sr[j];
            C[j] = c;
          }
        }
      }
      for (std::size_t op = 0; op < nops; ++op) {
        const double br = re_[op][k];
        const double bi = im_[op][k];
        double* a = acc.data() + op * kBlock;
        // Re(b e^{-ikhx}) = br cos(khx) + bi sin(khx)
        for (std::size_t j = 0; j < m; ++j) a[j] += br * C[j] + bi * S[j];
      }
    }
    for (std::size_t op = 0; op < nops; ++op)
      for (std::size_t j = 0; j < m; ++j)
        out[op * n + start + j] = std::exp(alpha_ * xs[start + j]) * acc[op * kBlock + j];
  }
}

double LatticeSlice::evaluate(int op, double x) const {
  std::vector<double> out(re_.size());
  evaluate(&x, 1, out.data());
  return out[op];
}

LatticeSlice make_lattice(const LevyModel& model, const DampedPayoff& payoff, double t, double T,
                          double window, const std::vector<LatticeSlice::Multiplier>& ops,
                          double tol) {
  if (!(t < T)) throw DomainError("lattice needs t < T");
  require_moment(model, payoff.alpha());
  const double tau = T - t;
  auto base = [&](cplx w) { return payoff.transform_at_zero(w) * std::exp(tau * model.psi(-w)); };
  return LatticeSlice(base, payoff.alpha(), window, ops, tol);
}

}  // namespace levyrep
