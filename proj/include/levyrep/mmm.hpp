#pragma once

#include <string>
#include <vector>

#include "levyrep/fourier_engine.hpp"
#include "levyrep/levy_model.hpp"
#include "levyrep/simulator.hpp"

namespace levyrep {

/// S_t = e^{rt + X_t}, discounted price S^_t = e^{X_t}.
struct MarketSpec {
  double r = 0.0;
  double T = 1.0;
  double K = 1.0;
  LevyModel model = LevyModel::brownian(0.0, 0.0, 0.0);

  void validate() const;
  /// log K - rT: the digital pays when X_T >= this level.
  double log_threshold() const;
};

/// Minimal martingale measure of a Levy market.
///
/// With k = mu^ / (sigma^2 + C2) the density process is the stochastic
/// exponential of -k (sigma W + int (e^x - 1) N~), so that
/// nu*(dx) = (1 - k (e^x - 1)) nu(dx) and W* = W + k sigma t.
struct MmmTransform {
  double c2 = 0.0;       // int (e^x - 1)^2 nu(dx)
  double mu_hat = 0.0;   // mu + sigma^2 / 2 + int (e^x - 1 - x) nu(dx)
  double k = 0.0;        // mu^ / (sigma^2 + C2)
  double girsanov_w = 0.0;  // k sigma
  double mu_star = 0.0;
  LevyModel physical = LevyModel::brownian(0.0, 0.0, 0.0);
  LevyModel star = LevyModel::brownian(0.0, 0.0, 0.0);

  double star_density_factor(double x) const;
  cplx psi_star(cplx z) const { return star.psi(z); }
  const JumpMeasure& nu_star() const { return star.jumps(); }
};

/// Throws AssumptionError unless C2 < inf and 0 >= mu^ > -sigma^2 - C2.
/// Also asserts psi*(-i) = 0 to 1e-8.
MmmTransform build_mmm(const MarketSpec& market);

/// p*_t(y): density of X_T - X_t under the minimal martingale measure.
EngineResult density_star(const MmmTransform& mmm, const QuadratureGrid& grid, double t,
                          double T, double y);

/// log dP~/dP on a physical path. Uses the realised jump marks, the marked
/// compensator, and the Gaussian small-jump term when the path carries one.
/// Throws DomainError if a jump has a non-positive density factor.
double mmm_log_density(const MmmTransform& mmm, const PathSimulator& simulator,
                       const PathRecord& path);

struct Assumption3Check {
  bool passed = false;
  bool c2_finite = false;
  bool moment_ok = false;     // alpha-moment under nu*, alpha >= 1
  bool mu_hat_ok = false;     // 0 >= mu^ > -sigma^2 - C2
  bool decay_ok = false;
  bool decay_inconclusive = false;
  double c2 = 0.0;
  double mu_hat = 0.0;
  double alpha = 1.0;
  std::vector<std::string> notes;
  std::string failed_part() const;
};

Assumption3Check check_assumption3(const MarketSpec& market, double alpha = 1.0);

}  // namespace levyrep
