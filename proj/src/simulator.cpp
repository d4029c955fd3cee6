#include "levyrep/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <variant>

#include "levyrep/errors.hpp"
#include "levyrep/parallel.hpp"
#include "levyrep/quadrature.hpp"

namespace levyrep {

namespace {

constexpr int kTableKnots = 1500;

double nig_gamma0(const NigJumps& p) { return std::sqrt(p.a * p.a - p.b * p.b); }

// Point beyond which density(y) y^2 is negligible, on the side `sign`.
double tail_reach(const JumpComponent& c, double sign, double start) {
  double y = std::max(start, 0.25);
  for (int k = 0; k < 600; ++k, y *= 1.05) {
    if (y > 1.0 && component_density(c, sign * y) * y * y < 1e-16) return y;
  }
  return y;
}

TabulatedJumps big_jump_table(const JumpComponent& c, double eps, double sign) {
  const double reach = tail_reach(c, sign, eps);
  TabulatedJumps t;
  t.knots.resize(kTableKnots);
  t.log_density.resize(kTableKnots);
  const double ratio = std::log(reach / eps) / (kTableKnots - 1);
  for (int j = 0; j < kTableKnots; ++j) {
    const double y = eps * std::exp(ratio * j);
    t.knots[j] = sign * y;
    t.log_density[j] = std::log(component_density(c, sign * y));
  }
  if (sign < 0) {
    std::reverse(t.knots.begin(), t.knots.end());
    std::reverse(t.log_density.begin(), t.log_density.end());
  }
  return t;
}

double small_jump_variance_below(const JumpComponent& c, double eps) {
  QuadratureOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-10;
  auto f = [&](double x) { return x * x * component_density(c, x); };
  return integrate_adaptive(f, -eps, 0.0, opt).value + integrate_adaptive(f, 0.0, eps, opt).value;
}

double normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

double uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng);
}

int poisson(double mean, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<int> p(mean);
  return p(rng);
}

double gamma_variate(double shape, double scale, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(shape, scale);
  return g(rng);
}

// Exact compensated increment of a VG or NIG component over tau.
double exact_component_increment(const JumpComponent& c, double tau, std::mt19937_64& rng) {
  if (const auto* vg = std::get_if<VgJumps>(&c)) {
    const double up = gamma_variate(vg->c * tau, 1.0 / vg->m, rng);
    const double down = gamma_variate(vg->c * tau, 1.0 / vg->g, rng);
    return up - down - tau * vg->c * (1.0 / vg->m - 1.0 / vg->g);
  }
  if (const auto* nig = std::get_if<NigJumps>(&c)) {
    const double g0 = nig_gamma0(*nig);
    const double mean = nig->delta * tau / g0;
    const double shape = nig->delta * tau * nig->delta * tau;
    const double I = sample_inverse_gaussian(mean, shape, rng);
    return nig->b * (I - mean) + std::sqrt(I) * normal(rng);
  }
  throw ParameterError("exact increments are only available for VG and NIG components");
}

// Little-endian binary helpers.
void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}
void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}
void put_f64(std::ostream& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(out, v);
}
std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("truncated path dump");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ConfigError("truncated path dump");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
double get_f64(std::istream& in) {
  const std::uint64_t v = get_u64(in);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

}  // namespace

std::string to_string(Measure m) {
  return m == Measure::Physical ? "physical" : "mmm";
}

double PathRecord::w_total() const {
  double s = 0.0;
  for (double d : dw) s += d;
  return s;
}

double PathRecord::small_jump_total() const {
  double s = 0.0;
  for (double d : small_jumps) s += d;
  return s;
}

PathRecord PathRecord::coarsen(int factor) const {
  if (factor < 1 || steps() % factor != 0)
    throw SchemeError("coarsening factor must divide the number of steps");
  PathRecord out;
  out.measure = measure;
  out.seed = seed;
  out.index = index;
  const int n = steps() / factor;
  out.times.resize(n + 1);
  out.x.resize(n + 1);
  out.dw.assign(n, 0.0);
  if (!small_jumps.empty()) out.small_jumps.assign(n, 0.0);
  for (int i = 0; i <= n; ++i) {
    out.times[i] = times[i * factor];
    out.x[i] = x[i * factor];
  }
  for (int i = 0; i < steps(); ++i) {
    out.dw[i / factor] += dw[i];
    if (!small_jumps.empty()) out.small_jumps[i / factor] += small_jumps[i];
  }
  out.jumps = jumps;
  for (auto& j : out.jumps) j.step /= factor;
  return out;
}

void SimulationSpec::validate() const {
  if (!(T > 0.0)) throw ParameterError("T must be positive");
  if (n_steps < 1) throw ParameterError("n_steps must be >= 1");
  if (!(epsilon_jump > 0.0)) throw ParameterError("epsilon_jump must be positive");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 path_rng(std::uint64_t master_seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(~index)));
}

double sample_inverse_gaussian(double mean, double shape, std::mt19937_64& rng) {
  const double n = normal(rng);
  const double y = n * n;
  const double x = mean + mean * mean * y / (2.0 * shape) -
                   mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  if (uniform(rng) <= mean / (mean + x)) return x;
  return mean * mean / x;
}

JumpTable JumpTable::from(const TabulatedJumps& t) {
  JumpTable out;
  out.knots = t.knots;
  out.log_density = t.log_density;
  out.cumulative.assign(t.knots.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.knots.size(); ++i) {
    const double d = t.knots[i + 1] - t.knots[i];
    const double a = std::exp(t.log_density[i]);
    const double s = (t.log_density[i + 1] - t.log_density[i]) / d;
    const double q = s * d;
    // mass and first moment of a e^{s (y - x_i)} on the segment
    const double e0 = std::abs(q) < 1e-8 ? a * d : a * std::expm1(q) / s;
    const double r1 = std::abs(q) < 1e-4 ? 0.5 + q / 3.0 : (std::exp(q) * (q - 1.0) + 1.0) / (q * q);
    out.cumulative[i + 1] = out.cumulative[i] + e0;
    out.mean += t.knots[i] * e0 + a * d * d * r1;
  }
  out.mass = out.cumulative.back();
  return out;
}

double JumpTable::sample(std::mt19937_64& rng) const {
  const double target = uniform(rng) * mass;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
  i = std::clamp<std::size_t>(i, 1, knots.size() - 1) - 1;
  const double d = knots[i + 1] - knots[i];
  const double a = std::exp(log_density[i]);
  const double s = (log_density[i + 1] - log_density[i]) / d;
  const double m = target - cumulative[i];
  double y;
  if (std::abs(s * d) < 1e-8) {
    y = knots[i] + m / a;
  } else {
    y = knots[i] + std::log1p(s * m / a) / s;
  }
  return std::clamp(y, knots[i], knots[i + 1]);
}

IncrementSampler::IncrementSampler(LevyModel model) : model_(std::move(model)) {
  for (const auto& c : model_.jumps().components())
    if (const auto* t = std::get_if<TabulatedJumps>(&c)) tables_.push_back(JumpTable::from(*t));
}

double IncrementSampler::sample(double tau, std::mt19937_64& rng) const {
  double x = model_.mu() * tau;
  if (model_.sigma() > 0.0) x += model_.sigma() * std::sqrt(tau) * normal(rng);
  std::size_t tab = 0;
  for (const auto& c : model_.jumps().components()) {
    if (const auto* m = std::get_if<MertonJumps>(&c)) {
      const int n = poisson(m->intensity * tau, rng);
      if (n > 0) x += n * m->mean + std::sqrt(static_cast<double>(n)) * m->stdev * normal(rng);
      x -= tau * m->intensity * m->mean;
    } else if (std::holds_alternative<TabulatedJumps>(c)) {
      const auto& t = tables_[tab++];
      const int n = poisson(t.mass * tau, rng);
      for (int k = 0; k < n; ++k) x += t.sample(rng);
      x -= tau * t.mean;
    } else {
      x += exact_component_increment(c, tau, rng);
    }
  }
  return x;
}

PathSimulator::PathSimulator(LevyModel model, SimulationSpec spec)
    : model_(std::move(model)), spec_(spec) {
  spec_.validate();
  measure_ = model_.kind() == ModelKind::MinimalMartingale ? Measure::MinimalMartingale
                                                           : Measure::Physical;
  bool infinite_variation = false;
  std::vector<JumpComponent> marked;
  for (const auto& c : model_.jumps().components()) {
    if (const auto* m = std::get_if<MertonJumps>(&c)) {
      merton_.push_back(*m);
      marked.push_back(c);
      marked_mean_ += m->intensity * m->mean;
    } else if (const auto* t = std::get_if<TabulatedJumps>(&c)) {
      tables_.push_back(JumpTable::from(*t));
      marked.push_back(c);
      marked_mean_ += tables_.back().mean;
    } else {
      if (std::holds_alternative<NigJumps>(c)) infinite_variation = true;
      if (spec_.exact_increments) {
        unmarked_.push_back(c);
        continue;
      }
      for (double sign : {-1.0, 1.0}) {
        auto table = big_jump_table(c, spec_.epsilon_jump, sign);
        tables_.push_back(JumpTable::from(table));
        marked_mean_ += tables_.back().mean;
        marked.push_back(std::move(table));
      }
    }
  }
  const bool correction =
      !spec_.exact_increments &&
      (spec_.small_jumps == SmallJumpCorrection::On ||
       (spec_.small_jumps == SmallJumpCorrection::Auto && infinite_variation));
  if (correction) {
    for (const auto& c : model_.jumps().components())
      if (std::holds_alternative<VgJumps>(c) || std::holds_alternative<NigJumps>(c))
        small_var_ += small_jump_variance_below(c, spec_.epsilon_jump);
  }
  marked_ = JumpMeasure(std::move(marked));
  if (!marked_.empty()) marked_exp_mean_ = marked_.cumulant_generating(1.0) + marked_mean_;
}

PathRecord PathSimulator::simulate(std::uint64_t master_seed, std::uint64_t index) const {
  auto rng = path_rng(master_seed, index);
  const int n = spec_.n_steps;
  const double dt = spec_.T / n;
  const double sigma = model_.sigma();
  const double small_sd = std::sqrt(small_var_ * dt);
  PathRecord p;
  p.measure = measure_;
  p.seed = master_seed;
  p.index = index;
  p.times.resize(n + 1);
  p.x.resize(n + 1);
  p.dw.resize(n);
  if (small_var_ > 0.0) p.small_jumps.resize(n);
  p.x[0] = model_.x0();
  p.times[0] = 0.0;
  std::vector<JumpMark> step_jumps;
  for (int i = 0; i < n; ++i) {
    const double t0 = i * dt;
    p.times[i + 1] = (i + 1 == n) ? spec_.T : (i + 1) * dt;
    const double dw = std::sqrt(dt) * normal(rng);
    p.dw[i] = dw;
    double incr = (model_.mu() - marked_mean_) * dt + sigma * dw;
    if (small_var_ > 0.0) {
      const double g = small_sd * normal(rng);
      p.small_jumps[i] = g;
      incr += g;
    }
    for (const auto& c : unmarked_) incr += exact_component_increment(c, dt, rng);

    step_jumps.clear();
    for (const auto& m : merton_) {
      const int k = poisson(m.intensity * dt, rng);
      for (int j = 0; j < k; ++j) {
        const double time = t0 + uniform(rng) * dt;
        step_jumps.push_back({time, m.mean + m.stdev * normal(rng), i, 0.0});
      }
    }
    for (const auto& t : tables_) {
      const int k = poisson(t.mass * dt, rng);
      for (int j = 0; j < k; ++j) {
        const double time = t0 + uniform(rng) * dt;
        step_jumps.push_back({time, t.sample(rng), i, 0.0});
      }
    }
    std::sort(step_jumps.begin(), step_jumps.end(),
              [](const JumpMark& a, const JumpMark& b) { return a.time < b.time; });
    double running = p.x[i];
    for (auto& j : step_jumps) {
      // drift and diffusion are spread linearly over the step
      j.x_before = running + incr * (j.time - t0) / dt;
      running += j.size;
      p.jumps.push_back(j);
    }
    p.x[i + 1] = running + incr;
  }
  return p;
}

std::vector<PathRecord> PathSimulator::simulate_many(std::uint64_t master_seed,
                                                     std::size_t n_paths,
                                                     std::uint64_t first_index) const {
  std::vector<PathRecord> out(n_paths);
  parallel_for(n_paths, [&](std::size_t k) { out[k] = simulate(master_seed, first_index + k); });
  return out;
}

std::vector<double> moments_from_psi(const LevyModel& model, int order) {
  if (order < 1 || order > 4) throw ParameterError("cumulant order must be in 1..4");
  std::vector<double> k(order, 0.0);
  const auto& jumps = model.jumps();
  k[0] = model.mu();
  if (order >= 2) k[1] = model.sigma() * model.sigma() + (jumps.empty() ? 0.0 : jumps.moment(2));
  if (order >= 3) k[2] = jumps.empty() ? 0.0 : jumps.moment(3);
  if (order >= 4) k[3] = jumps.empty() ? 0.0 : jumps.moment(4);
  return k;
}

void write_path_dump(std::ostream& out, const std::vector<PathRecord>& paths, std::uint64_t seed,
                     double T) {
  out.write("LCOP", 4);
  put_u32(out, 1);
  put_u64(out, seed);
  put_u64(out, paths.size());
  const std::uint64_t steps = paths.empty() ? 0 : paths.front().dw.size();
  put_u64(out, steps);
  put_f64(out, T);
  for (const auto& p : paths) {
    if (p.dw.size() != steps) throw SchemeError("paths in one dump must share the grid");
    put_u64(out, p.index);
    for (double v : p.x) put_f64(out, v);
    for (double v : p.dw) put_f64(out, v);
    put_u64(out, p.jumps.size());
    for (const auto& j : p.jumps) {
      put_f64(out, j.time);
      put_f64(out, j.size);
    }
  }
}

std::vector<PathRecord> read_path_dump(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "LCOP", 4) != 0)
    throw ConfigError("not a path dump (bad magic)");
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw ConfigError("unsupported path dump version " + std::to_string(version));
  const std::uint64_t seed = get_u64(in);
  const std::uint64_t n_paths = get_u64(in);
  const std::uint64_t steps = get_u64(in);
  const double T = get_f64(in);
  std::vector<PathRecord> out(n_paths);
  for (auto& p : out) {
    p.seed = seed;
    p.index = get_u64(in);
    p.x.resize(steps + 1);
    p.dw.resize(steps);
    p.times.resize(steps + 1);
    for (std::uint64_t i = 0; i <= steps; ++i) p.times[i] = T * static_cast<double>(i) / steps;
    for (auto& v : p.x) v = get_f64(in);
    for (auto& v : p.dw) v = get_f64(in);
    const std::uint64_t nj = get_u64(in);
    p.jumps.resize(nj);
    for (auto& j : p.jumps) {
      j.time = get_f64(in);
      j.size = get_f64(in);
      j.step = std::min<int>(static_cast<int>(j.time / T * steps), static_cast<int>(steps) - 1);
      j.x_before = p.x[j.step];
    }
  }
  return out;
}

void write_terminal_csv(std::ostream& out, const std::vector<PathRecord>& paths) {
  out << "index,x_T,w_T,jumps\n";
  out.precision(12);
  for (const auto& p : paths)
    out << p.index << ',' << p.x.back() << ',' << p.w_total() << ',' << p.jumps.size() << '\n';
}

}  // namespace levyrep
