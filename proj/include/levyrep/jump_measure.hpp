#pragma once

#include <complex>
#include <variant>
#include <vector>

namespace levyrep {

using cplx = std::complex<double>;

/// Gaussian jump sizes N(mean, stdev^2) arriving at rate `intensity`.
struct MertonJumps {
  double intensity;
  double mean;
  double stdev;
};

/// nu(dx) = c (1{x<0} e^{g x} + 1{x>0} e^{-m x}) / |x| dx.
struct VgJumps {
  double c;
  double g;
  double m;
};

/// nu(dx) = (delta a / pi) e^{b x} K1(a |x|) / |x| dx.
struct NigJumps {
  double a;
  double b;
  double delta;
};

/// Piecewise log-linear density on [knots.front(), knots.back()], zero
/// outside. Finite activity by construction.
struct TabulatedJumps {
  std::vector<double> knots;
  std::vector<double> log_density;
};

using JumpComponent = std::variant<MertonJumps, VgJumps, NigJumps, TabulatedJumps>;

/// Open interval of theta for which int_{|x|>=1} e^{theta x} nu(dx) < inf.
struct MomentInterval {
  double lower;
  double upper;
  bool contains(double theta) const { return theta > lower && theta < upper; }
};

/// A Levy measure written as a finite sum of parametric components.
///
/// Sums are closed under positive scaling and exponential tilting, which
/// is what the minimal martingale measure needs:
/// nu*(dx) = (1 + k) nu(dx) - k e^x nu(dx).
class JumpMeasure {
 public:
  JumpMeasure() = default;
  explicit JumpMeasure(std::vector<JumpComponent> components);

  const std::vector<JumpComponent>& components() const { return components_; }
  bool empty() const { return components_.empty(); }

  double density(double x) const;

  /// int (e^{izx} - 1 - izx) nu(dx). Throws DomainError when -Im z lies
  /// outside the exponential moment interval.
  cplx exponent(cplx z) const;

  /// kappa(theta) = int (e^{theta x} - 1 - theta x) nu(dx).
  double cumulant_generating(double theta) const;

  /// kappa'(theta) = int x (e^{theta x} - 1) nu(dx).
  double cumulant_generating_derivative(double theta) const;

  /// int x^n nu(dx) for n in {2, 3, 4}.
  double moment(int n) const;

  MomentInterval exponential_moment_interval() const;

  bool finite_activity() const;
  /// nu(R \ {0}); only meaningful with finite activity.
  double intensity() const;
  /// int_{|x|<1} |x| nu(dx) < inf.
  bool finite_variation() const;

  JumpMeasure scaled(double factor) const;
  /// e^{theta x} nu(dx).
  JumpMeasure esscher(double theta) const;
  JumpMeasure operator+(const JumpMeasure& other) const;

 private:
  std::vector<JumpComponent> components_;
};

void validate(const JumpComponent& component);

double component_density(const JumpComponent& component, double x);
cplx component_exponent(const JumpComponent& component, cplx z);
MomentInterval component_interval(const JumpComponent& component);

}  // namespace levyrep
