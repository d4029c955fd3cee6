#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "levyrep/errors.hpp"

namespace levyrep {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the n-point rule, computed once per n by Newton iteration on
/// P_n and cached for the lifetime of the process (thread-safe).
const GaussLegendreRule& gauss_legendre(int n);

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a;
  double b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
/// Works for real or complex integrands. Throws QuadratureError when the
/// requested tolerance is not met within `max_intervals` subdivisions.
template <class F>
auto integrate_adaptive(const F& f, double a, double b,
                        const QuadratureOptions& opt = {})
    -> QuadratureResult<decltype(f(a))> {
  using T = decltype(f(a));
  if (a == b) return {};
  if (a > b) {
    auto r = integrate_adaptive(f, b, a, opt);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<detail::Segment<T>> heap;
  auto first = detail::gk15<T>(f, a, b);
  T total = first.value;
  double err = first.error;
  heap.push(first);
  int intervals = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
    if (intervals >= opt.max_intervals) {
      throw QuadratureError("adaptive quadrature did not converge on [" +
                            std::to_string(a) + ", " + std::to_string(b) +
                            "], error estimate " + std::to_string(err));
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (!std::isfinite(err)) {
      throw QuadratureError("non-finite integrand in adaptive quadrature");
    }
  }
  // Recompute from the pieces to avoid drift in the running sums.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, intervals};
}

/// Integral over [a, inf) through x = a + s / (1 - s).
template <class F>
auto integrate_to_infinity(const F& f, double a,
                           const QuadratureOptions& opt = {})
    -> QuadratureResult<decltype(f(a))> {
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    const double x = a + s / one_minus;
    return f(x) * (1.0 / (one_minus * one_minus));
  };
  return integrate_adaptive(mapped, 0.0, 1.0, opt);
}

/// Integral over (-inf, b].
template <class F>
auto integrate_from_minus_infinity(const F& f, double b,
                                   const QuadratureOptions& opt = {})
    -> QuadratureResult<decltype(f(b))> {
  auto reflected = [&](double x) { return f(-x); };
  return integrate_to_infinity(reflected, -b, opt);
}

}  // namespace levyrep
