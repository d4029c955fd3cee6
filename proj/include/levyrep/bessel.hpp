#pragma once

namespace levyrep {

/// Modified Bessel function of the second kind of order one, x > 0.
///
/// Power series for x <= 2. Above the crossover the exponentially scaled
/// value e^x K1(x) = int_0^inf exp(-x (cosh t - 1)) cosh t dt is computed
/// with the trapezoidal rule, which converges geometrically because the
/// integrand is entire and decays double-exponentially.
double bessel_k1(double x);

/// e^x K1(x); avoids underflow for large arguments.
double bessel_k1_scaled(double x);

/// Leading large-argument form e^{-x} sqrt(pi / (2x)).
double bessel_k1_asymptotic(double x);

}  // namespace levyrep
