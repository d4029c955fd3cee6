#include "levyrep/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "levyrep/errors.hpp"

namespace levyrep {

namespace {

constexpr double kCrossover = 2.0;

double k1_series(double x) {
  const double q = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);
  // I1(x) = (x/2) sum q^k / (k! (k+1)!)
  // K1(x) = 1/x + ln(x/2) I1(x) - (x/4) sum (psi(k+1)+psi(k+2)) q^k / (k!(k+1)!)
  double term = 1.0;  // q^k / (k! (k+1)!)
  double psi_k1 = -std::numbers::egamma;        // psi(k+1)
  double psi_k2 = 1.0 - std::numbers::egamma;   // psi(k+2)
  double i1_sum = 0.0;
  double psi_sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    i1_sum += term;
    psi_sum += (psi_k1 + psi_k2) * term;
    if (term < 1e-18 * i1_sum) break;
    term *= q / ((k + 1.0) * (k + 2.0));
    psi_k1 += 1.0 / (k + 1.0);
    psi_k2 += 1.0 / (k + 2.0);
  }
  const double i1 = 0.5 * x * i1_sum;
  return 1.0 / x + log_half * i1 - 0.25 * x * psi_sum;
}

double k1_scaled_trapezoid(double x) {
  // the peak narrows like x^{-1/2}
  const double h = std::min(0.125, 0.4 / std::sqrt(x));
  // Stop once x (cosh t - 1) exceeds 50: remaining terms are < e^-50.
  const double t_max = std::acosh(1.0 + 50.0 / x);
  double sum = 0.5;  // t = 0 contributes cosh(0) = 1 with half weight
  for (double t = h; t <= t_max + h; t += h) {
    const double c = std::cosh(t);
    sum += std::exp(-x * (c - 1.0)) * c;
  }
  return h * sum;
}

}  // namespace

double bessel_k1(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k1 requires x > 0");
  if (x <= kCrossover) return k1_series(x);
  return std::exp(-x) * k1_scaled_trapezoid(x);
}

double bessel_k1_scaled(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k1_scaled requires x > 0");
  if (x <= kCrossover) return std::exp(x) * k1_series(x);
  return k1_scaled_trapezoid(x);
}

double bessel_k1_asymptotic(double x) {
  return std::exp(-x) * std::sqrt(std::numbers::pi / (2.0 * x));
}

}  // namespace levyrep
