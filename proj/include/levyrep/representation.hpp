#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levyrep/fourier_engine.hpp"
#include "levyrep/payoffs.hpp"
#include "levyrep/simulator.hpp"

namespace levyrep {

/// Integrands of f(X_T) = E[f(X_T)] + int u dW + int int theta N~(ds, dy)
/// with u(s, x) = sigma dF/dx(s, x) and theta(s, x, y) = F(s, x+y) - F(s, x),
/// F(s, x) = E[f(x + X_T - X_s)].
class RepresentationIntegrands {
 public:
  RepresentationIntegrands(LevyModel model, PayoffDecomposition payoff, QuadratureGrid grid,
                           double T);

  const LevyModel& model() const { return model_; }
  const PayoffDecomposition& payoff() const { return payoff_; }
  const QuadratureGrid& grid() const { return grid_; }
  double maturity() const { return T_; }

  /// E[f(X_T)] = F(0, X_0).
  double mean() const { return mean_; }

  EngineResult value(double s, double x) const;
  EngineResult u(double s, double x) const;
  EngineResult theta(double s, double x, double y) const;
  /// int theta(s, x, y) nu(dy) for a finite measure nu with first moment m1.
  EngineResult compensator(double s, double x, const JumpMeasure& nu, double m1) const;

 private:
  QuadratureGrid grid_for(const DampedPayoff& part) const;

  LevyModel model_;
  PayoffDecomposition payoff_;
  QuadratureGrid grid_;
  double T_;
  double mean_ = 0.0;
};

/// Fourier integrands for `payoff` (decomposed into one-sided parts when
/// needed). Each part is integrated on its own damping exponent.
RepresentationIntegrands build_integrands(const LevyModel& model, const DampedPayoff& payoff,
                                          const QuadratureGrid& grid, double T);

/// int y nu(dy) for a finite-activity measure.
double finite_jump_mean(const JumpMeasure& nu);

/// Lattice multiplier int (e^{-iwy} - 1) nu(dy) for a finite measure with
/// first moment m1.
LatticeSlice::Multiplier jump_compensator_multiplier(const JumpMeasure& nu, double m1);

/// Lattice window covering states within `spread` of the phase centre.
double lattice_window(double alpha, double spread);

struct ReplicationResult {
  std::vector<double> claim;        // f(X_T) per path
  std::vector<double> replication;  // mean + stochastic integrals per path
};

/// Replicates f(X_T) on simulated paths: the Brownian integral with u at the
/// left end of each step, realised jumps through theta at the pre-jump state,
/// minus the marked-jump compensator integrated in time at the left end.
/// All paths must share the simulator's time grid (or a coarsening of it).
class PathReplicator {
 public:
  PathReplicator(RepresentationIntegrands integrands, const PathSimulator& simulator);

  ReplicationResult replicate(const std::vector<PathRecord>& paths) const;
  double replicate_on_path(const PathRecord& path) const;

 private:
  RepresentationIntegrands integrands_;
  JumpMeasure marked_;
  double marked_mean_;
  double small_var_;
};

struct ReplicationStudy {
  int n_paths = 0;
  int n_steps = 0;
  double mse = 0.0;
  double mse_se = 0.0;
  double mean_claim = 0.0;
  double mean_replication = 0.0;
  double se = 0.0;  // standard error of mean_replication
  double analytic_mean = 0.0;
};

ReplicationStudy summarize(const ReplicationResult& r, int n_steps, double analytic_mean);
std::string to_json(const ReplicationStudy& s);

/// Replication studies at n_steps, n_steps / 2, n_steps / 4, ... built on
/// the same paths (common random numbers), finest first.
std::vector<ReplicationStudy> replication_convergence(const RepresentationIntegrands& integrands,
                                                      const SimulationSpec& spec,
                                                      std::size_t n_paths, std::uint64_t seed,
                                                      const std::vector<int>& coarsening);

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// Representation through conditional expectations of f and f' sampled with
/// exact increments; used for polynomial payoffs, which have no damped
/// transform.
class ConditionalExpectationRepresentation {
 public:
  ConditionalExpectationRepresentation(LevyModel model, DampedPayoff payoff, double T,
                                       std::size_t n_samples = 100000, std::uint64_t seed = 1);

  McEstimate value(double s, double x) const;
  McEstimate u(double s, double x) const;
  McEstimate theta(double s, double x, double y) const;

 private:
  std::vector<double> increments(double s) const;

  LevyModel model_;
  DampedPayoff payoff_;
  double T_;
  std::size_t n_;
  std::uint64_t seed_;
};

}  // namespace levyrep
