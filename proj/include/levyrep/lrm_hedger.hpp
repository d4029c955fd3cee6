#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "levyrep/fourier_engine.hpp"
#include "levyrep/mmm.hpp"
#include "levyrep/simulator.hpp"

namespace levyrep {

/// Pieces of the LRM hedge of the digital 1{S_T >= K} at (t, X_t = x):
/// F*(t, x) = P*(x + X_T - X_t >= log K - rT), kappa = dF*/dx = p*_t(log K - rT - x),
/// Psi*(x, y) = F*(t, x + y) - F*(t, x).
struct HedgeComponents {
  double value = 0.0;        // F*(t, x)
  double kappa = 0.0;
  double nu_integral = 0.0;  // int Psi*(x, y) (e^y - 1) nu(dy), physical nu
  double err_estimate = 0.0;
};

struct HedgeState {
  double t = 0.0;
  double x_t = 0.0;
  double s_hat = 0.0;  // discounted price before the step
  double xi = 0.0;
  double eta = 0.0;
  double l_fs = 0.0;
  double v_hat = 0.0;  // xi s_hat + eta
};

/// Digital payoff on the log threshold with damping alpha.
DampedPayoff digital_claim(const MarketSpec& market, double alpha = 1.0);

HedgeComponents lrm_components(const MarketSpec& market, const MmmTransform& mmm,
                               const QuadratureGrid& grid, double t, double x);

/// Psi*_t(x, y) = F*(t, x + y) - F*(t, x).
EngineResult psi_star_diff(const MarketSpec& market, const MmmTransform& mmm,
                           const QuadratureGrid& grid, double t, double x, double y);

/// xi^H_t = e^{-rT} / (S^_{t-} (sigma^2 + C2)) (kappa sigma^2 + nu_integral).
double lrm_xi(const MarketSpec& market, const MmmTransform& mmm, const QuadratureGrid& grid,
              double t, double x, double s_hat_minus);
/// Same with S^_{t-} = e^{x}.
double lrm_xi(const MarketSpec& market, const MmmTransform& mmm, const QuadratureGrid& grid,
              double t, double x);

/// Lattice multiplier of the nu-integral: int (e^{-iwy} - 1)(e^y - 1) nu(dy).
LatticeSlice::Multiplier lrm_nu_multiplier(const JumpMeasure& nu);

/// Per-path Foellmer-Schweizer bookkeeping.
struct FsPathResult {
  double l_terminal = 0.0;      // L^H_T
  double gain = 0.0;            // int xi dS^
  double claim = 0.0;           // e^{-rT} 1{X_T >= log K - rT}
  double identity_error = 0.0;  // claim - (H0 + gain + L^H_T)
  double bracket = 0.0;         // [L^H, M^]_T
  double control_bracket = 0.0; // same with xi scaled by 1.1
  double eta_terminal = 0.0;    // H0 + gain + L^H_T - xi S^ at the last step
  double xi_terminal = 0.0;
};

struct FsOptions {
  double control_scale = 1.1;
};

/// Runs the decomposition on physical paths sharing one grid. Integrands
/// are frozen at the left end of each step; jumps use the pre-jump state.
std::vector<FsPathResult> fs_decomposition(const MarketSpec& market, const MmmTransform& mmm,
                                           const QuadratureGrid& grid,
                                           const PathSimulator& simulator,
                                           const std::vector<PathRecord>& paths,
                                           const FsOptions& options = {});

FsPathResult fs_decomposition_on_path(const MarketSpec& market, const MmmTransform& mmm,
                                      const QuadratureGrid& grid, const PathSimulator& simulator,
                                      const PathRecord& path);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double z() const { return se > 0.0 ? mean / se : (mean == 0.0 ? 0.0 : 1e300); }
};

struct FsStudy {
  int n_paths = 0;
  int n_steps = 0;
  double h0 = 0.0;
  MeanSe l_terminal;
  MeanSe bracket;
  MeanSe control_bracket;
  MeanSe identity_error;
  double identity_mse = 0.0;
  double max_abs_l = 0.0;
};

FsStudy fs_study(const MarketSpec& market, const MmmTransform& mmm, const QuadratureGrid& grid,
                 const SimulationSpec& spec, std::size_t n_paths, std::uint64_t seed);
std::string to_json(const FsStudy& s);

struct OrthogonalityStatistic {
  MeanSe bracket;
  MeanSe control;
};

OrthogonalityStatistic orthogonality_check(const MarketSpec& market, const MmmTransform& mmm,
                                           std::size_t n_paths, int n_steps, std::uint64_t seed,
                                           const QuadratureGrid& grid = {});

struct HedgeGridRow {
  double t, S, xi, kappa, nu_integral, err_estimate;
};

/// n_t times in [0, T) times n_s prices log-spaced in K [e^{-1/2}, e^{1/2}].
std::vector<HedgeGridRow> hedge_grid(const MarketSpec& market, const MmmTransform& mmm,
                                     const QuadratureGrid& grid, int n_t = 50, int n_s = 101);
void write_hedge_csv(std::ostream& out, const std::vector<HedgeGridRow>& rows);

}  // namespace levyrep
