#pragma once

#include <complex>
#include <string>

#include "levyrep/jump_measure.hpp"

namespace levyrep {

enum class ModelKind {
  Merton,
  VarianceGamma,
  NormalInverseGaussian,
  BrownianOnly,
  Custom,
  // Image of a physical model under the minimal martingale measure.
  MinimalMartingale,
};

std::string to_string(ModelKind kind);

struct MertonParams {
  double gamma;
  double m;
  double delta;
};

struct VgParams {
  double c;
  double g;
  double m;
};

struct NigParams {
  double a;
  double b;
  double delta;
};

/// X_t = X_0 + mu t + sigma W_t + int x N~([0,t], dx): a square-integrable
/// Levy process written with a fully compensated jump part.
/// Immutable after construction.
class LevyModel {
 public:
  LevyModel(ModelKind kind, double x0, double mu, double sigma, JumpMeasure jumps);

  static LevyModel brownian(double x0, double mu, double sigma);
  static LevyModel merton(double x0, double mu, double sigma, const MertonParams& p);
  static LevyModel variance_gamma(double x0, double mu, const VgParams& p);
  static LevyModel normal_inverse_gaussian(double x0, double mu, const NigParams& p);
  static LevyModel custom(double x0, double mu, double sigma, JumpMeasure jumps);

  ModelKind kind() const { return kind_; }
  double x0() const { return x0_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  const JumpMeasure& jumps() const { return jumps_; }

  double levy_density(double x) const { return jumps_.density(x); }

  /// psi(z) = i z mu - sigma^2 z^2 / 2 + int (e^{izx} - 1 - izx) nu(dx).
  cplx psi(cplx z) const;

  /// Same model started from a different point.
  LevyModel with_x0(double x0) const;

 private:
  ModelKind kind_;
  double x0_;
  double mu_;
  double sigma_;
  JumpMeasure jumps_;
};

cplx characteristic_exponent(const LevyModel& model, cplx z);

/// E[exp(iz (X_T - X_t))] = exp((T - t) psi(z)).
cplx characteristic_function(const LevyModel& model, double t, double T, cplx z);

struct MomentCheck {
  bool finite = false;
  /// int_{|x|>=1} e^{alpha x} nu(dx) when finite, +inf otherwise.
  double value = 0.0;
  std::string diagnostic;
};

/// E[e^{alpha X_1}] < inf, equivalently int_{|x|>=1} e^{alpha x} nu(dx) < inf.
/// Negative alpha probes the left tail.
MomentCheck check_exponential_moment(const LevyModel& model, double alpha);

struct DecayCheck {
  bool passed = false;
  /// Smallest stable power-law decay exponent observed over the sampled
  /// times (+inf when every sample decays faster than any power).
  double worst_slope = 0.0;
  double worst_tbar = 0.0;
  /// Estimated integral of the dominating integrand beyond v_extent.
  double tail_estimate = 0.0;
  double v_extent = 0.0;
  std::string diagnostic;
};

struct DecayOptions {
  int tbar_samples = 5;
  double v_start = 1.0;
  int max_doublings = 24;
  double slope_margin = 0.05;
};

/// Numerical integrability test of
///   |phi(tbar, i z_v)| (1 + |z_v| + |int (e^{-z_v x} - 1 + z_v x) nu(dx)| / |z_v|)
/// over v, z_v = iv - alpha, for tbar sampled in [t/2, (T+t)/2]. The local
/// power-law slope is tracked on a doubling v-grid; throws InconclusiveError
/// if the tail cannot be classified within the maximum extent.
DecayCheck check_decay_condition(const LevyModel& model, double alpha, double t,
                                 double T, const DecayOptions& options = {});

struct SquareIntegrability {
  bool finite = false;
  double second_moment = 0.0;
  double tail_estimate = 0.0;
};

/// int x^2 nu(dx) < inf (analytic for named kinds, numeric for tabulated
/// components with tolerance 1e-6 on the tail estimate).
SquareIntegrability check_square_integrability(const LevyModel& model);

}  // namespace levyrep
