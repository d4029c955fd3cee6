#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "levyrep/jump_measure.hpp"
#include "levyrep/levy_model.hpp"

namespace levyrep {

enum class PayoffKind {
  Digital,       // 1{x >= c}
  ExpIndicator,  // e^x 1{x > 0}
  SqrtAbs,       // sqrt|x|, only usable through its decomposition
  SqrtAbsPlus,   // sqrt(x v 0)
  SqrtAbsMinus,  // sqrt((-x) v 0)
  Polynomial,
  Custom,
};

std::string to_string(PayoffKind kind);

/// A payoff f together with the damping exponent alpha of its transform
///   g^(x, z) = int e^{izy} f(x + y) dy = e^{-izx} g^(0, z),   Im z = alpha.
///
/// alpha is usually positive. The left-supported part sqrt((-x) v 0) is the
/// exception: its transform only exists for Im z < 0, so it carries a
/// negative alpha.
class DampedPayoff {
 public:
  static DampedPayoff digital(double c, double alpha = 1.0);
  static DampedPayoff exp_indicator(double alpha = 1.5);
  static DampedPayoff sqrt_abs(double alpha = 1.0);
  static DampedPayoff sqrt_abs_plus(double alpha = 1.0);
  static DampedPayoff sqrt_abs_minus(double alpha = -1.0);
  static DampedPayoff polynomial(std::vector<double> coeffs);
  static DampedPayoff constant(double value) { return polynomial({value}); }
  /// f supported in [lo, hi]. Without an explicit transform the engine falls
  /// back on adaptive quadrature (tolerance 1e-7).
  static DampedPayoff custom(std::function<double(double)> f, double lo, double hi,
                             double alpha = 1.0,
                             std::function<cplx(cplx)> transform_at_zero = {});

  PayoffKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  DampedPayoff with_alpha(double alpha) const;
  double strike_level() const { return c_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  double operator()(double x) const;
  /// f' where it exists (away from kinks and jumps).
  double derivative(double x) const;

  /// Whether a damped transform is available on the contour Im z = alpha.
  bool has_transform() const;
  cplx transform(double x, cplx z) const;
  cplx transform_at_zero(cplx z) const;

  /// Location around which e^{-izx} g^(0,z) is least oscillatory in x
  /// (c for a digital, 0 otherwise).
  double phase_center() const;
  /// Distance from the real v-axis to the nearest singularity of
  /// v -> g^(0, v + i alpha).
  double singularity_distance() const;
  /// sup |f|, +inf when unbounded.
  double sup_norm() const;

 private:
  DampedPayoff(PayoffKind kind, double alpha) : kind_(kind), alpha_(alpha) {}
  void check_contour(cplx z) const;

  PayoffKind kind_;
  double alpha_;
  double c_ = 0.0;
  std::vector<double> coeffs_;
  std::function<double(double)> f_;
  std::function<cplx(cplx)> custom_transform_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

struct SignedPart {
  int sign;
  DampedPayoff payoff;
};

/// f = sum sign_i * part_i.
struct PayoffDecomposition {
  std::vector<SignedPart> parts;
  double operator()(double x) const;
};

/// sqrt|x| expands into its two one-sided parts; every other payoff is
/// returned as a single part.
PayoffDecomposition decompose(const DampedPayoff& payoff);

/// -(1 / iz) e^{iz(c - x)}. Throws DomainError unless Im z > 0.
cplx digital_transform(double c, double x, cplx z);

enum class SqrtPart { Plus, Minus };

/// Closed forms e^{-izx} Gamma(3/2) (-iz)^{-3/2} (plus part, Im z > 0) and
/// e^{-izx} Gamma(3/2) (iz)^{-3/2} (minus part, Im z < 0).
cplx sqrt_parts_transform(SqrtPart part, double x, cplx z);
/// Transform of the derivative, -iz g^_pm(x, z).
cplx derivative_transform(SqrtPart part, double x, cplx z);

struct Assumption2Check {
  bool passed = false;
  bool l1_finite = false;
  bool finite_variation = false;
  bool square_integrable = false;  // f(X_T) in L^2(P)
  double l1_norm = 0.0;            // int |f(x)| e^{-alpha x} dx
  double total_variation = 0.0;    // of f(x) e^{-alpha x}
  double c_hat = 0.0;              // sup_v |z_v g^(0, -i z_v)| on [-1e4, 1e4]
  std::string diagnostic;
};

Assumption2Check check_assumption2(const DampedPayoff& payoff, const LevyModel& model);

/// sup over v in [-v_max, v_max] of |z_v g^(0, -i z_v)|, z_v = iv - alpha.
double damped_bound(const DampedPayoff& payoff, double v_max = 1e4, int samples = 20001);

/// Deterministic damping choice: 1 when the model admits it (1.5 for the
/// exponential indicator, -1 for the left part of sqrt|x|), otherwise the
/// midpoint of the admissible interval.
double default_alpha(PayoffKind kind, const LevyModel& model);

}  // namespace levyrep
