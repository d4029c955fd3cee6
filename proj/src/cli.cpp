#include "levyrep/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "levyrep/config_io.hpp"
#include "levyrep/errors.hpp"
#include "levyrep/lrm_hedger.hpp"
#include "levyrep/malliavin.hpp"
#include "levyrep/mmm.hpp"
#include "levyrep/parallel.hpp"
#include "levyrep/payoffs.hpp"
#include "levyrep/representation.hpp"

#ifndef LEVYREP_VERSION
#define LEVYREP_VERSION "0.0.0"
#endif

namespace levyrep {

const char* version() { return LEVYREP_VERSION; }

namespace {

struct Options {
  std::string command;
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 20240601;
  std::size_t paths = 0;
  int steps = 0;
  double tol = 0.0;
  std::string format = "";
};

struct Context {
  Options opt;
  LoadedConfig cfg;
  RunInputs in;
  std::ostream& out;
};

std::string tool_name() { return std::string("levyrep ") + version(); }

std::string csv_header(const Context& c) {
  return "# " + tool_name() + " config=" + hex64(c.cfg.hash) + "\n";
}

json json_header(const Context& c) {
  return json{{"tool", tool_name()}, {"config_hash", hex64(c.cfg.hash)}};
}

std::filesystem::path output_path(const Context& c, const std::string& stem, const std::string& fmt) {
  std::filesystem::create_directories(c.opt.out_dir);
  return std::filesystem::path(c.opt.out_dir) / (stem + "." + fmt);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write output file '" + p.string() + "'");
  f << text;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void emit_table(const Context& c, const std::string& stem, const Table& t,
                const std::string& default_fmt = "csv") {
  const std::string fmt = c.opt.format.empty() ? default_fmt : c.opt.format;
  const auto path = output_path(c, stem, fmt);
  std::ostringstream o;
  if (fmt == "csv") {
    o << csv_header(c);
    for (std::size_t k = 0; k < t.columns.size(); ++k) o << (k ? "," : "") << t.columns[k];
    o << "\n" << std::setprecision(12);
    for (const auto& r : t.rows) {
      for (std::size_t k = 0; k < r.size(); ++k) o << (k ? "," : "") << r[k];
      o << "\n";
    }
  } else {
    json j = json_header(c);
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    o << j.dump(2) << "\n";
  }
  write_text(path, o.str());
  c.out << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
}

void emit_report(const Context& c, const std::string& stem, json report) {
  const std::string fmt = c.opt.format.empty() ? "json" : c.opt.format;
  const auto path = output_path(c, stem, fmt);
  std::ostringstream o;
  if (fmt == "csv") {
    o << csv_header(c) << "key,value\n";
    for (const auto& [k, v] : report.flatten().items()) o << k << "," << v.dump() << "\n";
  } else {
    json j = json_header(c);
    j.update(report);
    o << j.dump(2) << "\n";
  }
  write_text(path, o.str());
  c.out << "wrote " << path.string() << "\n";
}

const char* mark(bool ok) { return ok ? "PASS" : "FAIL"; }

json section(const json& doc, const char* name) {
  return doc.contains(name) ? doc.at(name) : json::object();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = n == 1 ? a : a + (b - a) * k / (n - 1);
  return v;
}

QuadratureGrid grid_with_tol(const Context& c) {
  QuadratureGrid g = c.in.grid;
  if (c.opt.tol > 0.0) g.envelope_tol = c.opt.tol;
  return g;
}

const MarketSpec& require_market(const Context& c) {
  if (!c.in.market) throw ConfigError("this command needs a 'market' section");
  return *c.in.market;
}

const DampedPayoff& require_payoff(const Context& c) {
  if (!c.in.payoff) throw ConfigError("this command needs a 'payoff' section");
  return *c.in.payoff;
}

// ---------------------------------------------------------------- check

int cmd_check(Context& c) {
  const auto& model = c.in.model;
  const json sec = section(c.cfg.doc, "check");
  double alpha = 1.0;
  if (sec.contains("alpha")) alpha = sec.at("alpha").get<double>();
  else if (c.in.grid_alpha_given) alpha = c.in.grid.alpha;
  else if (c.in.payoff) alpha = c.in.payoff->alpha();
  const double alpha_star = sec.value("alpha_star", 1.0);

  json checks = json::array();
  bool all = true;
  auto add = [&](const std::string& name, bool ok, const std::string& detail, bool counts = true) {
    checks.push_back({{"name", name}, {"passed", ok}, {"detail", detail}});
    if (counts) all = all && ok;
    c.out << std::left << std::setw(34) << name << " " << mark(ok) << "  " << detail << "\n";
  };

  const auto sq = check_square_integrability(model);
  add("square integrability", sq.finite, "int x^2 nu = " + std::to_string(sq.second_moment));

  const auto mom = check_exponential_moment(model, alpha);
  add("Assumption 1 (moment)", mom.finite,
      "alpha = " + std::to_string(alpha) + "; " + mom.diagnostic);
  bool decay_ok = false;
  std::string decay_detail;
  try {
    const auto d = check_decay_condition(model, alpha, 0.0, c.in.T);
    decay_ok = d.passed;
    decay_detail = d.diagnostic;
  } catch (const InconclusiveError& e) {
    decay_detail = std::string("inconclusive: ") + e.what();
  } catch (const DomainError& e) {
    decay_detail = e.what();
  }
  add("Assumption 1 (decay, t = 0)", decay_ok, decay_detail, false);

  if (c.in.payoff) {
    const auto a2 = check_assumption2(*c.in.payoff, model);
    add("Assumption 2 (" + to_string(c.in.payoff->kind()) + ")", a2.passed, a2.diagnostic);
  }
  if (c.in.market) {
    const auto a3 = check_assumption3(*c.in.market, alpha_star);
    std::string detail = "alpha = " + std::to_string(alpha_star) + ", C2 = " +
                         std::to_string(a3.c2) + ", mu_hat = " + std::to_string(a3.mu_hat);
    for (const auto& n : a3.notes) detail += "; " + n;
    add("Assumption 3", a3.passed, detail);
    if (!a3.passed) {
      c.out << "Assumption 3: FAIL (" << a3.failed_part() << ")";
      if (model.sigma() == 0.0)
        c.out << " -- the LRM formula does not apply; see `levyrep malliavin` for the"
                 " Malliavin route";
      c.out << "\n";
    }
  }
  json report{{"checks", checks}, {"all_passed", all}};
  emit_report(c, "check", report);
  return all ? 0 : 1;
}

// ------------------------------------------------------------ represent

int cmd_represent(Context& c) {
  const auto& payoff = require_payoff(c);
  const auto& model = c.in.model;
  const double T = c.in.T;
  const json sec = section(c.cfg.doc, "represent");
  const auto ts = sec.value("t", std::vector<double>{0.0, 0.5 * T});
  const auto xs = sec.value("x", linspace(model.x0() - 0.5, model.x0() + 0.5, 11));
  const auto ys = sec.value("y", std::vector<double>{-0.1, 0.1});
  Table t;
  if (payoff.kind() == PayoffKind::Polynomial) {
    const std::size_t n = c.opt.paths ? c.opt.paths : 100000;
    const ConditionalExpectationRepresentation rep(model, payoff, T, n, c.opt.seed);
    t.columns = {"t", "x", "y", "value", "u", "theta", "value_se", "u_se", "theta_se"};
    for (double s : ts)
      for (double x : xs) {
        const auto v = rep.value(s, x);
        const auto u = rep.u(s, x);
        for (double y : ys) {
          const auto th = rep.theta(s, x, y);
          t.rows.push_back({s, x, y, v.value, u.value, th.value, v.se, u.se, th.se});
        }
      }
  } else {
    const auto integ = build_integrands(model, payoff, grid_with_tol(c), T);
    t.columns = {"t", "x", "y", "value", "u", "theta", "err_estimate"};
    std::vector<std::array<double, 3>> pts;
    for (double s : ts)
      for (double x : xs)
        for (double y : ys) pts.push_back({s, x, y});
    t.rows.resize(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
      const auto [s, x, y] = pts[k];
      const auto v = integ.value(s, x);
      const auto u = integ.u(s, x);
      const auto th = integ.theta(s, x, y);
      t.rows[k] = {s, x, y, v.value, u.value, th.value,
                   v.err_estimate + u.err_estimate + th.err_estimate};
    });
    c.out << "E[f(X_T)] = " << std::setprecision(10) << integ.mean() << "\n";
  }
  emit_table(c, "represent", t);
  return 0;
}

// -------------------------------------------------------------- density

int cmd_density(Context& c) {
  const json sec = section(c.cfg.doc, "density");
  const double T = c.in.T;
  const double t0 = sec.value("t", 0.0);
  const auto range = sec.value("y", std::vector<double>{-2.0, 2.0});
  if (range.size() != 2) throw ConfigError("density.y must be [y_min, y_max]");
  const int n = sec.value("n", 201);
  const std::string measure = sec.value("measure", std::string("physical"));
  LevyModel model = c.in.model;
  if (measure == "mmm") {
    model = build_mmm(require_market(c)).star;
  } else if (measure != "physical") {
    throw ConfigError("density.measure must be physical or mmm");
  }
  const auto g = grid_with_tol(c);
  const auto ys = linspace(range[0], range[1], n);
  Table t;
  t.columns = {"t", "x", "value", "err_estimate"};
  t.rows.resize(ys.size());
  parallel_for(ys.size(), [&](std::size_t k) {
    const auto r = density(model, g, t0, T, ys[k]);
    t.rows[k] = {t0, ys[k], r.value, r.err_estimate};
  });
  emit_table(c, "density", t);
  return 0;
}

// ---------------------------------------------------------------- hedge

int cmd_hedge(Context& c) {
  const auto& market = require_market(c);
  const auto mmm = build_mmm(market);
  const json sec = section(c.cfg.doc, "hedge");
  QuadratureGrid g = grid_with_tol(c);
  if (!c.in.grid_alpha_given) g.alpha = 1.0;
  const auto rows = hedge_grid(market, mmm, g, sec.value("n_t", 50), sec.value("n_s", 101));
  Table t;
  t.columns = {"t", "S", "xi", "kappa", "nu_integral", "err_estimate"};
  for (const auto& r : rows) t.rows.push_back({r.t, r.S, r.xi, r.kappa, r.nu_integral, r.err_estimate});
  emit_table(c, "hedge", t);
  return 0;
}

// -------------------------------------------------- verify-replication

int cmd_verify_replication(Context& c) {
  const auto& payoff = require_payoff(c);
  const auto integ = build_integrands(c.in.model, payoff, grid_with_tol(c), c.in.T);
  SimulationSpec spec = c.in.simulation;
  spec.n_steps = c.opt.steps ? c.opt.steps : 1000;
  const std::size_t n = c.opt.paths ? c.opt.paths : 10000;
  std::vector<int> factors;
  for (int f : {1, 2, 4})
    if (spec.n_steps % f == 0) factors.push_back(f);
  const auto studies = replication_convergence(integ, spec, n, c.opt.seed, factors);
  json arr = json::array();
  bool monotone = true;
  for (std::size_t k = 0; k < studies.size(); ++k) {
    arr.push_back(json::parse(to_json(studies[k])));
    if (k > 0 && !(studies[k - 1].mse < studies[k].mse)) monotone = false;
  }
  const auto& fine = studies.front();
  const bool unbiased = std::abs(fine.mean_replication - fine.analytic_mean) <= 3.0 * fine.se ||
                        (fine.se == 0.0 && std::abs(fine.mean_replication - fine.analytic_mean) < 1e-12);
  for (const auto& s : studies)
    c.out << "steps " << std::setw(5) << s.n_steps << "  mse " << std::setprecision(6) << s.mse
          << "  mean replication " << s.mean_replication << " +- " << s.se << "\n";
  c.out << "mse decreasing in steps: " << mark(monotone) << "\n"
        << "mean within 3 se of E[f(X_T)] = " << integ.mean() << ": " << mark(unbiased) << "\n";
  emit_report(c, "replication", json{{"studies", arr},
                                     {"mse_monotone", monotone},
                                     {"mean_within_3se", unbiased},
                                     {"passed", monotone && unbiased}});
  return monotone && unbiased ? 0 : 1;
}

// ------------------------------------------------------------ verify-fs

int cmd_verify_fs(Context& c) {
  const auto& market = require_market(c);
  const auto mmm = build_mmm(market);
  SimulationSpec spec = c.in.simulation;
  spec.n_steps = c.opt.steps ? c.opt.steps : 500;
  const std::size_t n = c.opt.paths ? c.opt.paths : 10000;
  QuadratureGrid g = grid_with_tol(c);
  if (!c.in.grid_alpha_given) g.alpha = 1.0;
  const auto s = fs_study(market, mmm, g, spec, n, c.opt.seed);
  const bool complete = market.model.jumps().empty();
  bool ok_l, ok_bracket, ok_control;
  if (complete) {
    ok_l = s.max_abs_l <= 1e-12;
    ok_bracket = std::abs(s.bracket.mean) <= 1e-12;
    ok_control = true;
  } else {
    ok_l = std::abs(s.l_terminal.z()) <= 3.0;
    ok_bracket = std::abs(s.bracket.z()) <= 3.0;
    ok_control = std::abs(s.control_bracket.z()) > 3.0;
  }
  c.out << std::setprecision(6) << "E[L_T] = " << s.l_terminal.mean << " +- " << s.l_terminal.se
        << "  " << mark(ok_l) << "\n"
        << "[L, M]_T = " << s.bracket.mean << " +- " << s.bracket.se << "  " << mark(ok_bracket)
        << "\n"
        << "[L, M]_T with 1.1 xi = " << s.control_bracket.mean << " +- " << s.control_bracket.se
        << "  " << mark(ok_control) << "\n";
  if (complete) c.out << "complete market: max |L_T| = " << s.max_abs_l << "\n";
  json report = json::parse(to_json(s));
  report["complete_market"] = complete;
  report["passed"] = ok_l && ok_bracket && ok_control;
  emit_report(c, "fs", report);
  return ok_l && ok_bracket && ok_control ? 0 : 1;
}

// ------------------------------------------------------------- malliavin

int cmd_malliavin(Context& c) {
  const auto r = malliavin_classify(c.in.model);
  c.out << "verdict: " << to_string(r.verdict) << " (" << r.reason << ")\n";
  for (std::size_t k = 0; k < r.eps.size(); ++k)
    c.out << "  I(" << r.eps[k] << ") = " << std::setprecision(10) << r.truncated[k] << "\n";
  c.out << "trend: " << to_string(r.trend) << ", I(1e-6)/I(1e-1) = " << r.ratio << "\n"
        << "caveat: " << r.caveat << "\n";
  json report{{"verdict", to_string(r.verdict)}, {"reason", r.reason},
              {"eps", r.eps},       {"truncated_integral", r.truncated},
              {"trend", to_string(r.trend)}, {"ratio", r.ratio},
              {"cauchy_gap", r.cauchy_gap}, {"caveat", r.caveat}};
  emit_report(c, "malliavin", report);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Martingale representation and LRM hedging for exponential Levy models"};
  app.set_version_flag("--version", tool_name());
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"check", "run the assumption checkers and print a verdict table"},
      {"represent", "emit the representation integrands u and theta"},
      {"density", "emit p_t (or p*_t) on a grid"},
      {"hedge", "emit the LRM hedge ratio term structure"},
      {"verify-replication", "Monte Carlo replication study"},
      {"verify-fs", "Monte Carlo Foellmer-Schweizer decomposition study"},
      {"malliavin", "classify Malliavin differentiability of digital payoffs"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--paths", opt.paths, "Monte Carlo paths");
    sub->add_option("--steps", opt.steps, "time steps per path");
    sub->add_option("--tol", opt.tol, "truncation envelope tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->callback([&opt, n = name] { opt.command = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    auto cfg = load_config(opt.config);
    auto in = resolve_inputs(cfg.doc);
    Context c{opt, std::move(cfg), std::move(in), out};
    if (opt.command == "check") return cmd_check(c);
    if (opt.command == "represent") return cmd_represent(c);
    if (opt.command == "density") return cmd_density(c);
    if (opt.command == "hedge") return cmd_hedge(c);
    if (opt.command == "verify-replication") return cmd_verify_replication(c);
    if (opt.command == "verify-fs") return cmd_verify_fs(c);
    if (opt.command == "malliavin") return cmd_malliavin(c);
    err << "unknown command\n";
    return 2;
  } catch (const Error& e) {
    err << json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
}

}  // namespace levyrep
