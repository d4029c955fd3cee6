#pragma once

#include <functional>
#include <string>
#include <vector>

#include "levyrep/levy_model.hpp"
#include "levyrep/payoffs.hpp"

namespace levyrep {

enum class QuadratureRule { UniformSimpson, GaussLegendrePanels };

std::string to_string(QuadratureRule rule);
QuadratureRule parse_rule(const std::string& name);

/// Integration contour z_v = iv - alpha, v in [-v_max, v_max].
///
/// v_max <= 0 selects the truncation automatically: the bound grows by 25%
/// until the integrand envelope falls below `envelope_tol` times its peak,
/// capped at `v_cap` (TruncationError beyond that). With Gauss-Legendre
/// panels n_nodes is a lower bound on the node count; panels are sized
/// from the local oscillation rate.
struct QuadratureGrid {
  double alpha = 1.0;
  double v_max = 0.0;
  int n_nodes = 64;
  QuadratureRule rule = QuadratureRule::GaussLegendrePanels;
  double envelope_tol = 1e-12;
  double v_cap = 1e6;

  void validate() const;
};

struct EngineResult {
  double value = 0.0;
  double err_estimate = 0.0;
  double imag_residual = 0.0;
  double v_max = 0.0;
  int n_nodes = 0;
};

/// Quadrature nodes on the contour, symmetric in v, together with the base
/// integrand A(v) = g^(x, w) phi(t, -w) / (2 pi) at every node, w = v + i alpha.
/// Every engine quantity is Re sum weight * A * M(w) for some multiplier M.
class ContourNodes {
 public:
  using Multiplier = std::function<cplx(cplx w)>;

  ContourNodes() = default;

  std::size_t size() const { return w_.size(); }
  const std::vector<cplx>& w() const { return w_; }
  const std::vector<double>& weights() const { return weight_; }
  const std::vector<cplx>& base() const { return base_; }
  const std::vector<cplx>& psi() const { return psi_; }
  double v_max() const { return v_max_; }
  double alpha() const { return alpha_; }
  /// Estimated |integral| of the base envelope beyond v_max.
  double tail() const { return tail_; }

  EngineResult apply(const Multiplier& m) const;
  /// Variant for multipliers available as a per-node array.
  EngineResult apply(const std::vector<cplx>& m) const;

  /// Builds nodes for an arbitrary base function of w. `omega` is the
  /// oscillation rate used for paneling, `singularity` the distance of the
  /// nearest singularity of base(w(v)) from the real v axis.
  static ContourNodes build(const std::function<cplx(cplx w)>& base,
                            const std::function<cplx(cplx w)>& psi_at,
                            const QuadratureGrid& grid, double omega,
                            double singularity, double envelope_power = 2.0);

 private:
  std::vector<cplx> w_;
  std::vector<double> weight_;
  std::vector<cplx> base_;
  std::vector<cplx> psi_;
  double v_max_ = 0.0;
  double alpha_ = 0.0;
  double tail_ = 0.0;
};

/// Node set for F(t, .) of `payoff` under `model` around state x.
/// `y_reach` widens the paneling for jump differences up to |y| <= y_reach.
ContourNodes value_nodes(const LevyModel& model, const DampedPayoff& payoff,
                         const QuadratureGrid& grid, double t, double x, double T,
                         double y_reach = 0.0);

/// Multipliers of the base integrand.
namespace multiplier {
cplx dx(cplx w);            // -z_v = -iw
cplx dxx(cplx w);           // z_v^2 = -w^2
cplx jump(cplx w, double y);  // e^{-z_v y} - 1
cplx compensated_jump(cplx w, double y);  // e^{-z_v y} - 1 + z_v y
}  // namespace multiplier

EngineResult conditional_value(const LevyModel& model, const DampedPayoff& payoff,
                               const QuadratureGrid& grid, double t, double x, double T);
EngineResult dF_dx(const LevyModel& model, const DampedPayoff& payoff,
                   const QuadratureGrid& grid, double t, double x, double T);
EngineResult d2F_dx2(const LevyModel& model, const DampedPayoff& payoff,
                     const QuadratureGrid& grid, double t, double x, double T);
EngineResult dF_dt(const LevyModel& model, const DampedPayoff& payoff,
                   const QuadratureGrid& grid, double t, double x, double T);
/// F(t, x + y) - F(t, x) in a single quadrature.
EngineResult jump_difference(const LevyModel& model, const DampedPayoff& payoff,
                             const QuadratureGrid& grid, double t, double x, double y,
                             double T);

/// int (F(t, x+y) - F(t, x) - y dF/dx(t, x)) nu(dy) through the closed form
/// of the compensated jump exponent.
EngineResult jump_generator(const LevyModel& model, const DampedPayoff& payoff,
                            const QuadratureGrid& grid, double t, double x, double T);

enum class PideMode {
  FourierCompensated,  // nu-term from the compensated multiplier under the v-integral
  DirectQuadrature,    // nu-term by adaptive quadrature in y of jump differences
};

struct PideResidual {
  double residual = 0.0;
  double dF_dt = 0.0;
  double dF_dx = 0.0;
  double d2F_dx2 = 0.0;
  double jump_term = 0.0;
  double err_estimate = 0.0;
};

/// dF/dt + mu dF/dx + sigma^2/2 d2F/dx2 + int (F(x+y) - F(x) - y dF/dx) nu(dy).
PideResidual pide_residual(const LevyModel& model, const DampedPayoff& payoff,
                           const QuadratureGrid& grid, double t, double x, double T,
                           PideMode mode = PideMode::FourierCompensated);

/// Density of X_T - X_t at y, inverted on the real line.
EngineResult density(const LevyModel& model, const QuadratureGrid& grid, double t,
                     double T, double y);

/// F(t, x) = E[e^{x + X_T - X_t} 1{x + X_T - X_t > 0}] and its x-derivative
/// F + p_t(-x).
struct ExpIndicatorValue {
  double value = 0.0;
  double derivative = 0.0;
  double err_estimate = 0.0;
};
ExpIndicatorValue exp_indicator_F(const LevyModel& model, double t, double x, double T,
                                  const QuadratureGrid& grid = {});

/// Characteristic lattice v_k = k h, k = 0..K, for Monte Carlo work: all
/// requested quantities for many states x at a fixed time, sharing the
/// per-node weights. Trapezoid rule; h = 2 pi / window, so the aliasing
/// error is of order e^{-alpha (window - |x - c|)}.
class LatticeSlice {
 public:
  using Multiplier = std::function<cplx(cplx w)>;

  LatticeSlice() = default;
  LatticeSlice(const std::function<cplx(cplx w)>& base_at_zero, double alpha, double window,
               const std::vector<Multiplier>& ops, double tol = 1e-10, double v_cap = 2e5);

  int operations() const { return static_cast<int>(re_.size()); }
  std::size_t nodes() const { return nodes_; }
  double step() const { return h_; }

  /// out[op * n + j] for states xs[0..n).
  void evaluate(const double* xs, std::size_t n, double* out) const;
  double evaluate(int op, double x) const;

 private:
  double alpha_ = 0.0;
  double h_ = 0.0;
  std::size_t nodes_ = 0;
  std::vector<std::vector<double>> re_;
  std::vector<std::vector<double>> im_;
};

/// Lattice for `payoff` under `model` at time t with the given multipliers.
LatticeSlice make_lattice(const LevyModel& model, const DampedPayoff& payoff, double t,
                          double T, double window, const std::vector<LatticeSlice::Multiplier>& ops,
                          double tol = 1e-10);

}  // namespace levyrep
