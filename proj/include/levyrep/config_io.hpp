#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "levyrep/fourier_engine.hpp"
#include "levyrep/levy_model.hpp"
#include "levyrep/mmm.hpp"
#include "levyrep/payoffs.hpp"
#include "levyrep/simulator.hpp"

namespace levyrep {

using json = nlohmann::json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

/// {"kind": "merton"|"vg"|"nig"|"brownian"|"custom", "params": {...},
///  "mu": r, "sigma": r, "x0": r}
LevyModel parse_model(const json& j);
/// {"r": r, "T": t, "K": k, "model": {...}}
MarketSpec parse_market(const json& j);
/// {"kind": "digital", "strike_level": c, "alpha": a} and similar.
/// Without "alpha" the damping falls back on `alpha_hint`, then on
/// default_alpha for the model.
DampedPayoff parse_payoff(const json& j, const LevyModel& model,
                          std::optional<double> alpha_hint = std::nullopt);
/// {"alpha": r, "v_max": r|"auto", "n_nodes": n, "rule": "..."}
QuadratureGrid parse_grid(const json& j);
/// {"epsilon_jump": r, "small_jumps": "auto"|"on"|"off", "exact_increments": b}
SimulationSpec parse_simulation(const json& j);

struct LoadedConfig {
  json doc;
  std::string text;
  std::uint64_t hash = 0;
};

LoadedConfig load_config(const std::string& path);

/// Everything a command needs, resolved from one config document.
struct RunInputs {
  LevyModel model = LevyModel::brownian(0.0, 0.0, 0.0);
  std::optional<MarketSpec> market;
  std::optional<DampedPayoff> payoff;
  QuadratureGrid grid;
  bool grid_alpha_given = false;
  SimulationSpec simulation;
  double T = 1.0;
};

RunInputs resolve_inputs(const json& doc);

}  // namespace levyrep
