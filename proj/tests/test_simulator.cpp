#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "levyrep/errors.hpp"
#include "levyrep/mmm.hpp"
#include "levyrep/simulator.hpp"
#include "oracles.hpp"

using namespace levyrep;

namespace {

std::vector<double> terminal(const PathSimulator& sim, std::size_t n, std::uint64_t seed) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sim.simulate(seed, i).x.back());
  return out;
}

double sample_var(const std::vector<double>& v) {
  const double m = oracle::mean(v);
  double q = 0;
  for (double x : v) q += (x - m) * (x - m);
  return q / (v.size() - 1);
}

// mean and variance of X_1 against independent cumulants
void check_two_moments(const std::vector<double>& xs, double k1, double k2, double k4) {
  const double n = xs.size();
  CHECK(std::abs(oracle::mean(xs) - k1) < 4.0 * std::sqrt(k2 / n));
  CHECK(std::abs(sample_var(xs) - k2) < 4.0 * std::sqrt((k4 + 2 * k2 * k2) / n));
}

// asymptotic two-sample Kolmogorov-Smirnov p-value
double ks_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  const double ne = double(a.size()) * b.size() / (a.size() + b.size());
  const double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0;
  for (int k = 1; k < 100; ++k) p += 2 * (k % 2 ? 1 : -1) * std::exp(-2.0 * k * k * lam * lam);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

TEST_CASE("paths are reproducible and independent of batching") {
  SimulationSpec s;
  s.n_steps = 50;
  PathSimulator sim(LevyModel::variance_gamma(0, -0.05, {1, 5, 5}), s);
  const auto a = sim.simulate(42, 7), b = sim.simulate(42, 7);
  CHECK(a.x == b.x);
  CHECK(a.dw == b.dw);
  REQUIRE(a.jumps.size() == b.jumps.size());
  for (std::size_t k = 0; k < a.jumps.size(); ++k) CHECK(a.jumps[k].size == b.jumps[k].size);
  const auto many = sim.simulate_many(42, 10);
  CHECK(many[7].x == a.x);
  CHECK(sim.simulate(43, 7).x != a.x);
}

TEST_CASE("Merton terminal moments") {
  SimulationSpec s;
  s.n_steps = 10;
  PathSimulator sim(LevyModel::merton(0, 0.03, 0.2, {1, -0.1, 0.3}), s);
  const double g = 1, m = -0.1, d = 0.3;
  const double k2 = 0.04 + g * (m * m + d * d);
  const double k4 = g * (m * m * m * m + 6 * m * m * d * d + 3 * d * d * d * d);
  check_two_moments(terminal(sim, 20000, 1), 0.03, k2, k4);
  const auto c = moments_from_psi(sim.model(), 4);
  CHECK(c[1] == doctest::Approx(k2).epsilon(1e-12));
  CHECK(c[2] == doctest::Approx(g * (m * m * m + 3 * m * d * d)).epsilon(1e-12));
}

TEST_CASE("VG and NIG moments in both simulation modes") {
  const double C = 1, G = 5, M = 5;
  const double vg_k2 = C * (1 / (M * M) + 1 / (G * G));
  const double vg_k4 = C * 6 * (1 / std::pow(M, 4) + 1 / std::pow(G, 4));
  const double a = 3, b = -1, dl = 1, g0 = std::sqrt(a * a - b * b);
  const double nig_k2 = dl * a * a / std::pow(g0, 3);
  const double nig_k4 = 3 * dl * a * a * (a * a + 4 * b * b) / std::pow(g0, 7);
  for (bool exact : {true, false}) {
    SimulationSpec s;
    s.n_steps = exact ? 1 : 20;
    s.exact_increments = exact;
    PathSimulator vg(LevyModel::variance_gamma(0, -0.05, {C, G, M}), s);
    check_two_moments(terminal(vg, 20000, 2), -0.05, vg_k2, vg_k4);
    PathSimulator nig(LevyModel::normal_inverse_gaussian(0, -0.25, {a, b, dl}), s);
    check_two_moments(terminal(nig, 20000, 3), -0.25, nig_k2, nig_k4);
    CHECK(nig.has_unmarked_part() == exact);
  }
}

TEST_CASE("increments are stationary") {
  SimulationSpec s;
  s.n_steps = 100;
  PathSimulator sim(LevyModel::merton(0, 0, 0.2, {1, -0.1, 0.3}), s);
  std::vector<double> early, late;
  for (int i = 0; i < 4000; ++i) {
    const auto p = sim.simulate(9, i);
    early.push_back(p.x[6] - p.x[5]);
    late.push_back(p.x[81] - p.x[80]);
  }
  CHECK(ks_pvalue(early, late) > 0.01);
}

TEST_CASE("discounted price is a martingale under the star triplet") {
  MarketSpec mk{0.02, 1.0, 1.0, LevyModel::merton(0, -0.1, 0.2, {1, -0.1, 0.3})};
  const auto mmm = build_mmm(mk);
  SimulationSpec s;
  s.n_steps = 4;
  PathSimulator sim(mmm.star, s);
  CHECK(sim.measure() == Measure::MinimalMartingale);
  std::vector<double> st;
  for (int i = 0; i < 40000; ++i) st.push_back(std::exp(sim.simulate(5, i).x.back()));
  CHECK(std::abs(oracle::mean(st) - 1.0) < 3.0 * oracle::std_error(st));
}

TEST_CASE("inverse Gaussian sampler") {
  auto rng = path_rng(1, 0);
  std::vector<double> v;
  const double mean = 0.7, shape = 2.0;
  for (int i = 0; i < 50000; ++i) v.push_back(sample_inverse_gaussian(mean, shape, rng));
  const double var = mean * mean * mean / shape;
  CHECK(std::abs(oracle::mean(v) - mean) < 4 * std::sqrt(var / v.size()));
  CHECK(sample_var(v) == doctest::Approx(var).epsilon(0.05));
}

TEST_CASE("jump table mass, mean and sampling") {
  TabulatedJumps t{{-0.5, -0.1, 0.2, 0.6}, {0.0, 1.0, 0.5, -1.0}};
  const auto tab = JumpTable::from(t);
  auto dens = [&](double y) {
    for (std::size_t k = 0; k + 1 < t.knots.size(); ++k)
      if (y >= t.knots[k] && y <= t.knots[k + 1]) {
        const double w = (y - t.knots[k]) / (t.knots[k + 1] - t.knots[k]);
        return std::exp((1 - w) * t.log_density[k] + w * t.log_density[k + 1]);
      }
    return 0.0;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double mass = 0, first = 0;
  for (std::size_t k = 0; k + 1 < t.knots.size(); ++k) {
    mass += GK::integrate(dens, t.knots[k], t.knots[k + 1], 8, 1e-13);
    first += GK::integrate([&](double y) { return y * dens(y); }, t.knots[k], t.knots[k + 1], 8, 1e-13);
  }
  CHECK(tab.mass == doctest::Approx(mass).epsilon(1e-10));
  CHECK(tab.mean == doctest::Approx(first).epsilon(1e-10));
  auto rng = path_rng(3, 0);
  std::vector<double> ys;
  for (int i = 0; i < 40000; ++i) ys.push_back(tab.sample(rng));
  CHECK(std::abs(oracle::mean(ys) - first / mass) < 4 * oracle::std_error(ys));
  CHECK(*std::min_element(ys.begin(), ys.end()) >= -0.5);
  CHECK(*std::max_element(ys.begin(), ys.end()) <= 0.6);
}

TEST_CASE("coarsening keeps the endpoints and the Brownian total") {
  SimulationSpec s;
  s.n_steps = 40;
  PathSimulator sim(LevyModel::merton(0, 0, 0.2, {2, 0.0, 0.2}), s);
  const auto p = sim.simulate(8, 3);
  const auto c = p.coarsen(4);
  CHECK(c.steps() == 10);
  CHECK(c.x.back() == p.x.back());
  CHECK(c.w_total() == doctest::Approx(p.w_total()).epsilon(1e-13));
  for (const auto& j : c.jumps) CHECK(c.times[j.step] <= j.time);
  CHECK_THROWS(p.coarsen(3));
}

TEST_CASE("binary dump round trip and terminal csv") {
  SimulationSpec s;
  s.n_steps = 8;
  PathSimulator sim(LevyModel::merton(0, 0, 0.2, {1, -0.1, 0.3}), s);
  const auto paths = sim.simulate_many(4, 5);
  std::stringstream buf;
  write_path_dump(buf, paths, 4, 1.0);
  CHECK(buf.str().substr(0, 4) == "LCOP");
  const auto back = read_path_dump(buf);
  REQUIRE(back.size() == paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    CHECK(back[i].x == paths[i].x);
    CHECK(back[i].dw == paths[i].dw);
    CHECK(back[i].jumps.size() == paths[i].jumps.size());
  }
  std::ostringstream csv;
  write_terminal_csv(csv, paths);
  CHECK(csv.str().rfind("index,x_T,w_T,jumps", 0) == 0);
}

TEST_CASE("simulation settings are validated") {
  SimulationSpec s;
  s.n_steps = 0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
}
