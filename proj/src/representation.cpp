#include "levyrep/representation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "levyrep/errors.hpp"
#include "levyrep/parallel.hpp"

namespace levyrep {

namespace {

const cplx kI(0.0, 1.0);

void add(EngineResult& total, const EngineResult& part, int sign) {
  total.value += sign * part.value;
  total.err_estimate += part.err_estimate;
  total.imag_residual += part.imag_residual;
  total.v_max = std::max(total.v_max, part.v_max);
  total.n_nodes += part.n_nodes;
}

double cutoff(double T) { return T - 1e-4 * T; }

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  s.mean = m;
  s.se = v.size() > 1 ? std::sqrt(q / (v.size() - 1) / v.size()) : 0.0;
  return s;
}

}  // namespace

RepresentationIntegrands::RepresentationIntegrands(LevyModel model, PayoffDecomposition payoff,
                                                   QuadratureGrid grid, double T)
    : model_(std::move(model)), payoff_(std::move(payoff)), grid_(grid), T_(T) {
  if (!(T_ > 0.0)) throw ParameterError("maturity must be positive");
  if (payoff_.parts.empty()) throw ParameterError("empty payoff decomposition");
  for (const auto& p : payoff_.parts)
    if (!p.payoff.has_transform())
      throw DomainError(to_string(p.payoff.kind()) +
                        " payoff has no damped transform; use the conditional-expectation form");
  mean_ = value(0.0, model_.x0()).value;
}

QuadratureGrid RepresentationIntegrands::grid_for(const DampedPayoff& part) const {
  QuadratureGrid g = grid_;
  g.alpha = part.alpha();
  return g;
}

EngineResult RepresentationIntegrands::value(double s, double x) const {
  EngineResult r;
  for (const auto& p : payoff_.parts)
    add(r, conditional_value(model_, p.payoff, grid_for(p.payoff), s, x, T_), p.sign);
  return r;
}

EngineResult RepresentationIntegrands::u(double s, double x) const {
  EngineResult r;
  if (model_.sigma() == 0.0) return r;
  for (const auto& p : payoff_.parts)
    add(r, dF_dx(model_, p.payoff, grid_for(p.payoff), s, x, T_), p.sign);
  r.value *= model_.sigma();
  r.err_estimate *= model_.sigma();
  return r;
}

EngineResult RepresentationIntegrands::theta(double s, double x, double y) const {
  EngineResult r;
  if (y == 0.0) return r;
  for (const auto& p : payoff_.parts)
    add(r, jump_difference(model_, p.payoff, grid_for(p.payoff), s, x, y, T_), p.sign);
  return r;
}

EngineResult RepresentationIntegrands::compensator(double s, double x, const JumpMeasure& nu,
                                                   double m1) const {
  EngineResult r;
  if (nu.empty()) return r;
  const auto lambda = jump_compensator_multiplier(nu, m1);
  for (const auto& p : payoff_.parts)
    add(r, value_nodes(model_, p.payoff, grid_for(p.payoff), s, x, T_).apply(lambda), p.sign);
  return r;
}

RepresentationIntegrands build_integrands(const LevyModel& model, const DampedPayoff& payoff,
                                          const QuadratureGrid& grid, double T) {
  return RepresentationIntegrands(model, decompose(payoff), grid, T);
}

double finite_jump_mean(const JumpMeasure& nu) {
  double m = 0.0;
  for (const auto& c : nu.components()) {
    if (const auto* mj = std::get_if<MertonJumps>(&c)) {
      m += mj->intensity * mj->mean;
    } else if (const auto* t = std::get_if<TabulatedJumps>(&c)) {
      m += JumpTable::from(*t).mean;
    } else {
      throw DomainError("first jump moment needs a finite-activity measure");
    }
  }
  return m;
}

LatticeSlice::Multiplier jump_compensator_multiplier(const JumpMeasure& nu, double m1) {
  return [nu, m1](cplx w) -> cplx {
    if (nu.empty()) return 0.0;
    return nu.exponent(-w) - kI * w * m1;
  };
}

double lattice_window(double alpha, double spread) {
  return 36.0 / std::max(std::abs(alpha), 0.05) + 2.0 * spread + 1.0;
}

PathReplicator::PathReplicator(RepresentationIntegrands integrands, const PathSimulator& simulator)
    : integrands_(std::move(integrands)),
      marked_(simulator.marked_jumps()),
      marked_mean_(simulator.marked_mean()),
      small_var_(simulator.small_jump_variance()) {
  if (simulator.has_unmarked_part())
    throw SchemeError("replication needs jump marks; disable exact increments");
}

ReplicationResult PathReplicator::replicate(const std::vector<PathRecord>& paths) const {
  ReplicationResult out;
  const std::size_t n = paths.size();
  if (n == 0) return out;
  const int steps = paths.front().steps();
  const double T = integrands_.maturity();
  const auto& model = integrands_.model();
  const double sigma = model.sigma();

  double xmin = paths.front().x.front(), xmax = xmin;
  std::vector<std::vector<std::pair<std::size_t, const JumpMark*>>> by_step(steps);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& path = paths[p];
    if (path.steps() != steps) throw SchemeError("paths must share one time grid");
    if (std::abs(path.times.back() - T) > 1e-12 * T)
      throw SchemeError("path horizon differs from the claim maturity");
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

  out.claim.resize(n);
  out.replication.assign(n, integrands_.mean());
  for (std::size_t p = 0; p < n; ++p) out.claim[p] = integrands_.payoff()(paths[p].x.back());

  const std::vector<LatticeSlice::Multiplier> ops = {
      [](cplx) { return cplx(1.0); }, multiplier::dx,
      jump_compensator_multiplier(marked_, marked_mean_)};
  const bool need_dx = sigma > 0.0 || small_var_ > 0.0;

  std::vector<double> xs, vals;
  for (int i = 0; i < steps; ++i) {
    const auto& times = paths.front().times;
    const double s = times[i];
    const double dt = times[i + 1] - times[i];
    if (s > cutoff(T))
      throw SchemeError("step starts at s = " + std::to_string(s) +
                        ", beyond the near-maturity cutoff T - 1e-4 T");
    const auto& jumps = by_step[i];
    if (!need_dx && marked_.empty()) continue;

    xs.resize(n + 2 * jumps.size());
    for (std::size_t p = 0; p < n; ++p) xs[p] = paths[p].x[i];
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      xs[n + 2 * k] = jumps[k].second->x_before;
      xs[n + 2 * k + 1] = jumps[k].second->x_before + jumps[k].second->size;
    }
    const std::size_t m = xs.size();
    vals.resize(ops.size() * m);
    for (const auto& part : integrands_.payoff().parts) {
      const double c = part.payoff.phase_center();
      const double spread = std::max(std::abs(xmax - c), std::abs(xmin - c));
      const auto lattice = make_lattice(model, part.payoff, s, T,
                                        lattice_window(part.payoff.alpha(), spread), ops);
      lattice.evaluate(xs.data(), m, vals.data());
      const double* fx = vals.data() + m;
      const double* lam = vals.data() + 2 * m;
      for (std::size_t p = 0; p < n; ++p) {
        double d = sigma * fx[p] * paths[p].dw[i] - lam[p] * dt;
        if (small_var_ > 0.0) d += fx[p] * paths[p].small_jumps[i];
        out.replication[p] += part.sign * d;
      }
      for (std::size_t k = 0; k < jumps.size(); ++k)
        out.replication[jumps[k].first] += part.sign * (vals[n + 2 * k + 1] - vals[n + 2 * k]);
    }
  }
  return out;
}

double PathReplicator::replicate_on_path(const PathRecord& path) const {
  return replicate({path}).replication.front();
}

ReplicationStudy summarize(const ReplicationResult& r, int n_steps, double analytic_mean) {
  ReplicationStudy s;
  s.n_paths = static_cast<int>(r.claim.size());
  s.n_steps = n_steps;
  s.analytic_mean = analytic_mean;
  std::vector<double> sq(r.claim.size());
  for (std::size_t p = 0; p < sq.size(); ++p) {
    const double e = r.claim[p] - r.replication[p];
    sq[p] = e * e;
  }
  const auto e = stats(sq);
  s.mse = e.mean;
  s.mse_se = e.se;
  s.mean_claim = stats(r.claim).mean;
  const auto rep = stats(r.replication);
  s.mean_replication = rep.mean;
  s.se = rep.se;
  return s;
}

std::string to_json(const ReplicationStudy& s) {
  std::ostringstream o;
  o.precision(12);
  o << "{\"n_paths\": " << s.n_paths << ", \"n_steps\": " << s.n_steps << ", \"mse\": " << s.mse
    << ", \"mse_se\": " << s.mse_se << ", \"mean_claim\": " << s.mean_claim
    << ", \"mean_replication\": " << s.mean_replication << ", \"se\": " << s.se
    << ", \"analytic_mean\": " << s.analytic_mean << "}";
  return o.str();
}

std::vector<ReplicationStudy> replication_convergence(const RepresentationIntegrands& integrands,
                                                      const SimulationSpec& spec,
                                                      std::size_t n_paths, std::uint64_t seed,
                                                      const std::vector<int>& coarsening) {
  SimulationSpec sim_spec = spec;
  sim_spec.T = integrands.maturity();
  const PathSimulator sim(integrands.model(), sim_spec);
  const PathReplicator replicator(integrands, sim);
  std::vector<ReplicationResult> all(coarsening.size());
  constexpr std::size_t kBatch = 2500;
  for (std::size_t first = 0; first < n_paths; first += kBatch) {
    const std::size_t count = std::min(kBatch, n_paths - first);
    const auto paths = sim.simulate_many(seed, count, first);
    for (std::size_t f = 0; f < coarsening.size(); ++f) {
      ReplicationResult r;
      if (coarsening[f] == 1) {
        r = replicator.replicate(paths);
      } else {
        std::vector<PathRecord> coarse;
        coarse.reserve(paths.size());
        for (const auto& p : paths) coarse.push_back(p.coarsen(coarsening[f]));
        r = replicator.replicate(coarse);
      }
      all[f].claim.insert(all[f].claim.end(), r.claim.begin(), r.claim.end());
      all[f].replication.insert(all[f].replication.end(), r.replication.begin(),
                                r.replication.end());
    }
  }
  std::vector<ReplicationStudy> out;
  for (std::size_t f = 0; f < coarsening.size(); ++f)
    out.push_back(summarize(all[f], sim_spec.n_steps / coarsening[f], integrands.mean()));
  return out;
}

ConditionalExpectationRepresentation::ConditionalExpectationRepresentation(
    LevyModel model, DampedPayoff payoff, double T, std::size_t n_samples, std::uint64_t seed)
    : model_(std::move(model)), payoff_(std::move(payoff)), T_(T), n_(n_samples), seed_(seed) {
  if (n_ < 2) throw ParameterError("need at least two samples");
}

std::vector<double> ConditionalExpectationRepresentation::increments(double s) const {
  if (!(s < T_)) return std::vector<double>(n_, 0.0);
  // Same stream for every (s, x): common random numbers across states.
  auto rng = path_rng(seed_, 0);
  const IncrementSampler sampler(model_);
  std::vector<double> z(n_);
  for (auto& v : z) v = sampler.sample(T_ - s, rng);
  return z;
}

McEstimate ConditionalExpectationRepresentation::value(double s, double x) const {
  const auto z = increments(s);
  std::vector<double> f(n_);
  for (std::size_t k = 0; k < n_; ++k) f[k] = payoff_(x + z[k]);
  const auto st = stats(f);
  return {st.mean, st.se};
}

McEstimate ConditionalExpectationRepresentation::u(double s, double x) const {
  if (model_.sigma() == 0.0) return {};
  const auto z = increments(s);
  std::vector<double> f(n_);
  for (std::size_t k = 0; k < n_; ++k) f[k] = model_.sigma() * payoff_.derivative(x + z[k]);
  const auto st = stats(f);
  return {st.mean, st.se};
}

McEstimate ConditionalExpectationRepresentation::theta(double s, double x, double y) const {
  if (y == 0.0) return {};
  const auto z = increments(s);
  std::vector<double> f(n_);
  for (std::size_t k = 0; k < n_; ++k) f[k] = payoff_(x + y + z[k]) - payoff_(x + z[k]);
  const auto st = stats(f);
  return {st.mean, st.se};
}

}  // namespace levyrep
