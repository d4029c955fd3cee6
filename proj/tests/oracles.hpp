#pragma once

// Closed forms used as independent references in the tests.

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct Merton {
  double mu, sigma, gamma, m, delta;
};

// Conditional on n jumps in time tau, X_tau is Gaussian.
template <class G>
double poisson_mixture(const Merton& p, double tau, G&& g) {
  const double lam = p.gamma * tau;
  double w = std::exp(-lam), total = 0.0;
  for (int n = 0; n < 200; ++n) {
    if (n > 0) w *= lam / n;
    const double mean = (p.mu - p.gamma * p.m) * tau + n * p.m;
    const double sd = std::sqrt(p.sigma * p.sigma * tau + n * p.delta * p.delta);
    total += w * g(mean, sd);
    if (n > lam && w < 1e-18) break;
  }
  return total;
}

// P(x + X_tau >= c)
inline double merton_digital(const Merton& p, double tau, double x, double c) {
  return poisson_mixture(p, tau, [&](double mean, double sd) { return norm_cdf((x + mean - c) / sd); });
}

inline double merton_density(const Merton& p, double tau, double y) {
  return poisson_mixture(p, tau, [&](double mean, double sd) { return norm_pdf((y - mean) / sd) / sd; });
}

// Brownian X_tau = mu tau + sigma W_tau.
inline double bs_digital(double mu, double sigma, double tau, double x, double c) {
  return norm_cdf((x + mu * tau - c) / (sigma * std::sqrt(tau)));
}
inline double bs_digital_dx(double mu, double sigma, double tau, double x, double c) {
  const double s = sigma * std::sqrt(tau);
  return norm_pdf((x + mu * tau - c) / s) / s;
}
inline double bs_digital_dxx(double mu, double sigma, double tau, double x, double c) {
  const double s = sigma * std::sqrt(tau);
  const double d = (x + mu * tau - c) / s;
  return -d * norm_pdf(d) / (s * s);
}
inline double bs_density(double mu, double sigma, double tau, double y) {
  const double s = sigma * std::sqrt(tau);
  return norm_pdf((y - mu * tau) / s) / s;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}
inline double std_error(const std::vector<double>& v) {
  const double m = mean(v);
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  return std::sqrt(q / (v.size() - 1) / v.size());
}

}  // namespace oracle
