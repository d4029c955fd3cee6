#include "levyrep/config_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "levyrep/errors.hpp"

namespace levyrep {

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return number(j, key);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

LevyModel parse_model(const json& j) {
  if (!j.is_object()) throw ConfigError("model must be an object");
  if (!j.contains("kind")) throw ConfigError("model needs a 'kind'");
  const std::string kind = lower(j.at("kind").get<std::string>());
  const json params = j.value("params", json::object());
  const double x0 = number_or(j, "x0", 0.0);
  const double mu = number_or(j, "mu", 0.0);
  const double sigma = number_or(j, "sigma", 0.0);
  if (kind == "merton")
    return LevyModel::merton(x0, mu, sigma,
                             {number(params, "gamma"), number(params, "m"), number(params, "delta")});
  if (kind == "vg" || kind == "variance_gamma") {
    if (sigma != 0.0) throw ConfigError("VG models have sigma = 0");
    return LevyModel::variance_gamma(x0, mu,
                                     {number(params, "C"), number(params, "G"), number(params, "M")});
  }
  if (kind == "nig") {
    if (sigma != 0.0) throw ConfigError("NIG models have sigma = 0");
    return LevyModel::normal_inverse_gaussian(
        x0, mu, {number(params, "a"), number(params, "b"), number(params, "delta")});
  }
  if (kind == "brownian") return LevyModel::brownian(x0, mu, sigma);
  if (kind == "custom") {
    TabulatedJumps t;
    try {
      t.knots = params.at("knots").get<std::vector<double>>();
      t.log_density = params.at("log_density").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("custom model needs numeric 'knots' and 'log_density': ") +
                        e.what());
    }
    return LevyModel::custom(x0, mu, sigma, JumpMeasure({t}));
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

MarketSpec parse_market(const json& j) {
  if (!j.is_object()) throw ConfigError("market must be an object");
  MarketSpec m;
  m.r = number_or(j, "r", 0.0);
  m.T = number_or(j, "T", 1.0);
  m.K = number_or(j, "K", 1.0);
  if (!j.contains("model")) throw ConfigError("market needs a 'model'");
  m.model = parse_model(j.at("model"));
  m.validate();
  return m;
}

DampedPayoff parse_payoff(const json& j, const LevyModel& model, std::optional<double> alpha_hint) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("payoff needs a 'kind'");
  const std::string kind = lower(j.at("kind").get<std::string>());
  auto alpha_for = [&](PayoffKind k) {
    if (j.contains("alpha")) return number(j, "alpha");
    if (alpha_hint) return *alpha_hint;
    return default_alpha(k, model);
  };
  if (kind == "digital")
    return DampedPayoff::digital(number(j, "strike_level"), alpha_for(PayoffKind::Digital));
  if (kind == "exp_indicator")
    return DampedPayoff::exp_indicator(alpha_for(PayoffKind::ExpIndicator));
  if (kind == "sqrt_abs") return DampedPayoff::sqrt_abs(alpha_for(PayoffKind::SqrtAbsPlus));
  if (kind == "sqrt_abs_plus")
    return DampedPayoff::sqrt_abs_plus(alpha_for(PayoffKind::SqrtAbsPlus));
  if (kind == "sqrt_abs_minus")
    return DampedPayoff::sqrt_abs_minus(alpha_for(PayoffKind::SqrtAbsMinus));
  if (kind == "polynomial") {
    if (!j.contains("coeffs")) throw ConfigError("polynomial payoff needs 'coeffs'");
    return DampedPayoff::polynomial(j.at("coeffs").get<std::vector<double>>());
  }
  if (kind == "constant") return DampedPayoff::constant(number(j, "value"));
  throw ConfigError("unknown payoff kind '" + kind + "'");
}

QuadratureGrid parse_grid(const json& j) {
  QuadratureGrid g;
  if (j.is_null()) return g;
  if (!j.is_object()) throw ConfigError("grid must be an object");
  g.alpha = number_or(j, "alpha", g.alpha);
  if (j.contains("v_max")) {
    const auto& v = j.at("v_max");
    if (v.is_string()) {
      if (lower(v.get<std::string>()) != "auto") throw ConfigError("v_max must be a number or \"auto\"");
      g.v_max = 0.0;
    } else {
      g.v_max = number(j, "v_max");
      if (!(g.v_max > 0.0)) throw ConfigError("v_max must be positive");
    }
  }
  if (j.contains("n_nodes")) g.n_nodes = j.at("n_nodes").get<int>();
  if (j.contains("rule")) g.rule = parse_rule(j.at("rule").get<std::string>());
  g.envelope_tol = number_or(j, "envelope_tol", g.envelope_tol);
  g.validate();
  return g;
}

SimulationSpec parse_simulation(const json& j) {
  SimulationSpec s;
  if (j.is_null()) return s;
  s.epsilon_jump = number_or(j, "epsilon_jump", s.epsilon_jump);
  if (j.contains("small_jumps")) {
    const std::string v = lower(j.at("small_jumps").get<std::string>());
    if (v == "auto") s.small_jumps = SmallJumpCorrection::Auto;
    else if (v == "on") s.small_jumps = SmallJumpCorrection::On;
    else if (v == "off") s.small_jumps = SmallJumpCorrection::Off;
    else throw ConfigError("small_jumps must be auto, on or off");
  }
  s.exact_increments = j.value("exact_increments", false);
  return s;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  LoadedConfig out;
  out.text = ss.str();
  out.hash = fnv1a(out.text);
  try {
    out.doc = json::parse(out.text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return out;
}

RunInputs resolve_inputs(const json& doc) {
  RunInputs in;
  try {
    if (doc.contains("market")) {
      in.market = parse_market(doc.at("market"));
      in.model = in.market->model;
      in.T = in.market->T;
    } else if (doc.contains("model")) {
      in.model = parse_model(doc.at("model"));
      in.T = number_or(doc, "T", 1.0);
    } else {
      throw ConfigError("config needs a 'model' or a 'market'");
    }
    if (!(in.T > 0.0)) throw ConfigError("T must be positive");
    if (doc.contains("grid")) {
      in.grid = parse_grid(doc.at("grid"));
      in.grid_alpha_given = doc.at("grid").contains("alpha");
    }
    if (doc.contains("payoff")) {
      std::optional<double> hint;
      if (in.grid_alpha_given) hint = in.grid.alpha;
      in.payoff = parse_payoff(doc.at("payoff"), in.model, hint);
    }
    if (doc.contains("simulation")) in.simulation = parse_simulation(doc.at("simulation"));
    in.simulation.T = in.T;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return in;
}

}  // namespace levyrep
