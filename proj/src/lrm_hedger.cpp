#include "levyrep/lrm_hedger.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "levyrep/errors.hpp"
#include "levyrep/parallel.hpp"
#include "levyrep/representation.hpp"

namespace levyrep {

namespace {

const cplx kI(0.0, 1.0);

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  out.mean = m;
  out.se = v.size() > 1 ? std::sqrt(q / (v.size() - 1) / v.size()) : 0.0;
  return out;
}

double alpha_of(const QuadratureGrid& grid) { return grid.alpha > 0.0 ? grid.alpha : 1.0; }

void json_pair(std::ostringstream& o, const char* name, const MeanSe& m) {
  o << "\"" << name << "\": {\"mean\": " << m.mean << ", \"se\": " << m.se << "}";
}

}  // namespace

DampedPayoff digital_claim(const MarketSpec& market, double alpha) {
  return DampedPayoff::digital(market.log_threshold(), alpha);
}

LatticeSlice::Multiplier lrm_nu_multiplier(const JumpMeasure& nu) {
  // Jc(-w - i) - Jc(-w) - Jc(-i) with Jc(z) = int (e^{izy} - 1 - izy) nu(dy)
  return [nu](cplx w) -> cplx {
    if (nu.empty()) return 0.0;
    return nu.exponent(-w - kI) - nu.exponent(-w) - nu.exponent(-kI);
  };
}

HedgeComponents lrm_components(const MarketSpec& market, const MmmTransform& mmm,
                               const QuadratureGrid& grid, double t, double x) {
  if (!(t < market.T)) throw DomainError("hedge ratios need t < T");
  QuadratureGrid g = grid;
  g.alpha = alpha_of(grid);
  const auto payoff = digital_claim(market, g.alpha);
  const auto nodes = value_nodes(mmm.star, payoff, g, t, x, market.T);
  HedgeComponents out;
  const auto f = nodes.apply([](cplx) { return cplx(1.0); });
  const auto k = nodes.apply(multiplier::dx);
  out.value = f.value;
  out.kappa = k.value;
  out.err_estimate = k.err_estimate;
  const auto& nu = mmm.physical.jumps();
  if (!nu.empty()) {
    const auto n = nodes.apply(lrm_nu_multiplier(nu));
    out.nu_integral = n.value;
    out.err_estimate += n.err_estimate;
  }
  return out;
}

EngineResult psi_star_diff(const MarketSpec& market, const MmmTransform& mmm,
                           const QuadratureGrid& grid, double t, double x, double y) {
  QuadratureGrid g = grid;
  g.alpha = alpha_of(grid);
  return jump_difference(mmm.star, digital_claim(market, g.alpha), g, t, x, y, market.T);
}

double lrm_xi(const MarketSpec& market, const MmmTransform& mmm, const QuadratureGrid& grid,
              double t, double x, double s_hat_minus) {
  if (!(s_hat_minus > 0.0)) throw DomainError("discounted price must be positive");
  const auto c = lrm_components(market, mmm, grid, t, x);
  const double s2 = mmm.physical.sigma() * mmm.physical.sigma();
  return std::exp(-market.r * market.T) / (s_hat_minus * (s2 + mmm.c2)) *
         (c.kappa * s2 + c.nu_integral);
}

double lrm_xi(const MarketSpec& market, const MmmTransform& mmm, const QuadratureGrid& grid,
              double t, double x) {
  return lrm_xi(market, mmm, grid, t, x, std::exp(x));
}

std::vector<FsPathResult> fs_decomposition(const MarketSpec& market, const MmmTransform& mmm,
                                           const QuadratureGrid& grid,
                                           const PathSimulator& simulator,
                                           const std::vector<PathRecord>& paths,
                                           const FsOptions& options) {
  const std::size_t n = paths.size();
  std::vector<FsPathResult> out(n);
  if (n == 0) return out;
  if (simulator.has_unmarked_part())
    throw SchemeError("the decomposition needs jump marks; disable exact increments");
  const double T = market.T;
  const int steps = paths.front().steps();
  const double disc = std::exp(-market.r * T);
  const double sigma = mmm.physical.sigma();
  const double s2 = sigma * sigma;
  const double denom = s2 + mmm.c2;
  const double alpha = alpha_of(grid);
  const auto payoff = digital_claim(market, alpha);
  const double c = market.log_threshold();

  const auto& marked = simulator.marked_jumps();
  const double m1 = simulator.marked_mean();
  const double e1 = simulator.marked_exp_mean();

  QuadratureGrid g = grid;
  g.alpha = alpha;
  const double h0 = disc * conditional_value(mmm.star, payoff, g, 0.0, paths.front().x.front(), T).value;

  double xmin = paths.front().x.front(), xmax = xmin;
  std::vector<std::vector<std::pair<std::size_t, const JumpMark*>>> by_step(steps);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& path = paths[p];
    if (path.measure != Measure::Physical)
      throw SchemeError("the decomposition runs on physical paths");
    if (path.steps() != steps) throw SchemeError("paths must share one time grid");
    if (std::abs(path.times.back() - T) > 1e-12 * T)
      throw SchemeError("path horizon differs from the maturity");
    if (path.x.front() != paths.front().x.front())
      throw SchemeError("paths must share the initial state");
    for (double v : path.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (const auto& j : path.jumps) {
      by_step[j.step].push_back({p, &j});
      for (double v : {j.x_before, j.x_before + j.size}) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
      }
    }
  }
  const double window = lattice_window(alpha, std::max(std::abs(xmax - c), std::abs(xmin - c)));
  const std::vector<LatticeSlice::Multiplier> ops = {
      [](cplx) { return cplx(1.0); }, multiplier::dx, lrm_nu_multiplier(mmm.physical.jumps()),
      jump_compensator_multiplier(marked, m1)};

  std::vector<double> xs, vals, xi(n), dl_base(n), dm(n);
  for (int i = 0; i < steps; ++i) {
    const auto& times = paths.front().times;
    const double s = times[i];
    const double dt = times[i + 1] - times[i];
    if (s > T - 1e-4 * T)
      throw SchemeError("step starts at s = " + std::to_string(s) +
                        ", beyond the near-maturity cutoff T - 1e-4 T");
    const auto& jumps = by_step[i];
    xs.resize(n + 2 * jumps.size());
    for (std::size_t p = 0; p < n; ++p) xs[p] = paths[p].x[i];
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      xs[n + 2 * k] = jumps[k].second->x_before;
      xs[n + 2 * k + 1] = jumps[k].second->x_before + jumps[k].second->size;
    }
    const std::size_t m = xs.size();
    vals.resize(ops.size() * m);
    const auto lattice = make_lattice(mmm.star, payoff, s, T, window, ops);
    lattice.evaluate(xs.data(), m, vals.data());
    const double* F = vals.data();
    const double* kappa = vals.data() + m;
    const double* nuint = vals.data() + 2 * m;
    const double* lam = vals.data() + 3 * m;

    for (std::size_t p = 0; p < n; ++p) {
      const auto& path = paths[p];
      const double sh = std::exp(path.x[i]);
      xi[p] = disc / (sh * denom) * (kappa[p] * s2 + nuint[p]);
      double noise = sigma * path.dw[i];
      if (!path.small_jumps.empty()) noise += path.small_jumps[i];
      dl_base[p] = disc * (kappa[p] * noise - lam[p] * dt);
      dm[p] = sh * (noise - e1 * dt);
    }
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      const std::size_t p = jumps[k].first;
      const auto* j = jumps[k].second;
      dl_base[p] += disc * (F[n + 2 * k + 1] - F[n + 2 * k]);
      dm[p] += std::exp(j->x_before) * std::expm1(j->size);
    }
    for (std::size_t p = 0; p < n; ++p) {
      auto& r = out[p];
      const auto& path = paths[p];
      const double dl = dl_base[p] - xi[p] * dm[p];
      const double dl_control = dl_base[p] - options.control_scale * xi[p] * dm[p];
      r.l_terminal += dl;
      r.bracket += dl * dm[p];
      r.control_bracket += dl_control * dm[p];
      r.gain += xi[p] * (std::exp(path.x[i + 1]) - std::exp(path.x[i]));
      r.xi_terminal = xi[p];
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    auto& r = out[p];
    const double xT = paths[p].x.back();
    r.claim = xT >= c ? disc : 0.0;
    const double v_hat = h0 + r.gain + r.l_terminal;
    r.identity_error = r.claim - v_hat;
    r.eta_terminal = v_hat - r.xi_terminal * std::exp(xT);
  }
  return out;
}

FsPathResult fs_decomposition_on_path(const MarketSpec& market, const MmmTransform& mmm,
                                      const QuadratureGrid& grid, const PathSimulator& simulator,
                                      const PathRecord& path) {
  return fs_decomposition(market, mmm, grid, simulator, {path}).front();
}

FsStudy fs_study(const MarketSpec& market, const MmmTransform& mmm, const QuadratureGrid& grid,
                 const SimulationSpec& spec, std::size_t n_paths, std::uint64_t seed) {
  SimulationSpec sim_spec = spec;
  sim_spec.T = market.T;
  const PathSimulator sim(mmm.physical, sim_spec);
  std::vector<double> l, br, ctl, err;
  constexpr std::size_t kBatch = 2500;
  FsStudy s;
  for (std::size_t first = 0; first < n_paths; first += kBatch) {
    const std::size_t count = std::min(kBatch, n_paths - first);
    const auto paths = sim.simulate_many(seed, count, first);
    for (const auto& r : fs_decomposition(market, mmm, grid, sim, paths)) {
      l.push_back(r.l_terminal);
      br.push_back(r.bracket);
      ctl.push_back(r.control_bracket);
      err.push_back(r.identity_error);
      s.max_abs_l = std::max(s.max_abs_l, std::abs(r.l_terminal));
    }
  }
  QuadratureGrid g = grid;
  g.alpha = alpha_of(grid);
  s.h0 = std::exp(-market.r * market.T) *
         conditional_value(mmm.star, digital_claim(market, g.alpha), g, 0.0, mmm.physical.x0(),
                           market.T)
             .value;
  s.n_paths = static_cast<int>(n_paths);
  s.n_steps = sim_spec.n_steps;
  s.l_terminal = mean_se(l);
  s.bracket = mean_se(br);
  s.control_bracket = mean_se(ctl);
  s.identity_error = mean_se(err);
  double q = 0.0;
  for (double e : err) q += e * e;
  s.identity_mse = err.empty() ? 0.0 : q / err.size();
  return s;
}

std::string to_json(const FsStudy& s) {
  std::ostringstream o;
  o.precision(12);
  o << "{\"n_paths\": " << s.n_paths << ", \"n_steps\": " << s.n_steps << ", \"h0\": " << s.h0
    << ", ";
  json_pair(o, "l_terminal", s.l_terminal);
  o << ", ";
  json_pair(o, "bracket", s.bracket);
  o << ", ";
  json_pair(o, "control_bracket", s.control_bracket);
  o << ", ";
  json_pair(o, "identity_error", s.identity_error);
  o << ", \"identity_mse\": " << s.identity_mse << ", \"max_abs_l\": " << s.max_abs_l << "}";
  return o.str();
}

OrthogonalityStatistic orthogonality_check(const MarketSpec& market, const MmmTransform& mmm,
                                           std::size_t n_paths, int n_steps, std::uint64_t seed,
                                           const QuadratureGrid& grid) {
  SimulationSpec spec;
  spec.n_steps = n_steps;
  const auto s = fs_study(market, mmm, grid, spec, n_paths, seed);
  return {s.bracket, s.control_bracket};
}

std::vector<HedgeGridRow> hedge_grid(const MarketSpec& market, const MmmTransform& mmm,
                                     const QuadratureGrid& grid, int n_t, int n_s) {
  if (n_t < 1 || n_s < 2) throw ParameterError("hedge grid needs n_t >= 1 and n_s >= 2");
  std::vector<HedgeGridRow> rows(static_cast<std::size_t>(n_t) * n_s);
  const double disc = std::exp(-market.r * market.T);
  const double s2 = mmm.physical.sigma() * mmm.physical.sigma();
  parallel_for(rows.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx / n_s);
    const int j = static_cast<int>(idx % n_s);
    const double t = market.T * i / n_t;
    const double S = market.K * std::exp(-0.5 + static_cast<double>(j) / (n_s - 1));
    const double x = std::log(S) - market.r * t;
    const double sh = std::exp(x);
    const auto c = lrm_components(market, mmm, grid, t, x);
    const double scale = disc / (sh * (s2 + mmm.c2));
    rows[idx] = {t, S, scale * (c.kappa * s2 + c.nu_integral), c.kappa, c.nu_integral,
                 scale * c.err_estimate * std::max(1.0, s2)};
  });
  return rows;
}

void write_hedge_csv(std::ostream& out, const std::vector<HedgeGridRow>& rows) {
  out << "t,S,xi,kappa,nu_integral,err_estimate\n";
  out.precision(12);
  for (const auto& r : rows)
    out << r.t << ',' << r.S << ',' << r.xi << ',' << r.kappa << ',' << r.nu_integral << ','
        << r.err_estimate << '\n';
}

}  // namespace levyrep
