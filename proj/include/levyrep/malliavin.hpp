#pragma once

#include <string>
#include <vector>

#include "levyrep/levy_model.hpp"

namespace levyrep {

enum class MalliavinVerdict { Differentiable, NotDifferentiable };

std::string to_string(MalliavinVerdict v);

enum class TruncationTrend { Convergent, Divergent, Unclear };

std::string to_string(TruncationTrend t);

struct MalliavinReport {
  MalliavinVerdict verdict = MalliavinVerdict::NotDifferentiable;
  std::string reason;
  /// I(eps) = int_{eps < |x| < 1} |x| nu(dx) at eps = 1e-1, ..., 1e-6.
  std::vector<double> eps;
  std::vector<double> truncated;
  TruncationTrend trend = TruncationTrend::Unclear;
  double ratio = 0.0;      // I(1e-6) / I(1e-1)
  double cauchy_gap = 0.0; // |I(1e-6) - I(1e-5)|
  std::string caveat;
};

/// Whether 1{X_T >= c} is Malliavin differentiable: never with a Brownian
/// part, and for pure-jump models exactly when int_{|x|<1} |x| nu(dx) < inf.
MalliavinReport malliavin_classify(const LevyModel& model);

/// int_{eps < |x| < 1} |x| nu(dx).
double truncated_first_moment(const JumpMeasure& nu, double eps);

}  // namespace levyrep
