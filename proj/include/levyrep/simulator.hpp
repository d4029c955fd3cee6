#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "levyrep/levy_model.hpp"

namespace levyrep {

enum class Measure { Physical, MinimalMartingale };

std::string to_string(Measure m);

struct JumpMark {
  double time;
  double size;
  int step;        // index i of the step (t_i, t_{i+1}] containing the jump
  double x_before; // X just before the jump
};

/// One simulated path on the grid t_i = i T / n.
struct PathRecord {
  std::vector<double> times;           // n + 1
  std::vector<double> x;               // X at the grid times, n + 1
  std::vector<double> dw;              // Brownian increments, n
  std::vector<double> small_jumps;     // Gaussian small-jump term per step (empty when off)
  std::vector<JumpMark> jumps;         // sorted by time
  Measure measure = Measure::Physical;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  int steps() const { return static_cast<int>(dw.size()); }
  double w_total() const;
  double small_jump_total() const;

  /// Same path on the grid with `factor` times fewer steps.
  PathRecord coarsen(int factor) const;
};

enum class SmallJumpCorrection { Auto, On, Off };

struct SimulationSpec {
  double T = 1.0;
  int n_steps = 100;
  /// Jumps with |y| < epsilon_jump are not simulated individually (VG, NIG).
  double epsilon_jump = 1e-3;
  /// Gaussian replacement of the small jumps; Auto means on for infinite
  /// variation (NIG) and off otherwise.
  SmallJumpCorrection small_jumps = SmallJumpCorrection::Auto;
  /// VG and NIG: sample exact increments (Gamma difference, inverse Gaussian
  /// subordination) instead of truncated jump marks.
  bool exact_increments = false;

  void validate() const;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Independent stream for path `index`; same result for any thread count.
std::mt19937_64 path_rng(std::uint64_t master_seed, std::uint64_t index);

/// Inverse Gaussian variate with the given mean and shape
/// (Michael, Schucany and Haas).
double sample_inverse_gaussian(double mean, double shape, std::mt19937_64& rng);

/// Inverse-CDF sampler for a piecewise log-linear jump density.
struct JumpTable {
  std::vector<double> knots;
  std::vector<double> log_density;
  std::vector<double> cumulative;  // mass on [knots[0], knots[i]]
  double mass = 0.0;
  double mean = 0.0;  // int y density(y) dy

  static JumpTable from(const TabulatedJumps& t);
  double sample(std::mt19937_64& rng) const;
};

/// Exact sampler of X_{t+tau} - X_t (compound Poisson for finite-activity
/// parts, Gamma difference for VG, inverse Gaussian subordination for NIG).
class IncrementSampler {
 public:
  explicit IncrementSampler(LevyModel model);
  double sample(double tau, std::mt19937_64& rng) const;

 private:
  LevyModel model_;
  std::vector<JumpTable> tables_;
};

class PathSimulator {
 public:
  PathSimulator(LevyModel model, SimulationSpec spec);

  const LevyModel& model() const { return model_; }
  const SimulationSpec& spec() const { return spec_; }
  Measure measure() const { return measure_; }

  PathRecord simulate(std::uint64_t master_seed, std::uint64_t index) const;
  std::vector<PathRecord> simulate_many(std::uint64_t master_seed, std::size_t n_paths,
                                        std::uint64_t first_index = 0) const;

  /// The finite Levy measure whose jumps appear as marks (|y| >= epsilon for
  /// infinite-activity parts; empty for parts sampled exactly without marks).
  const JumpMeasure& marked_jumps() const { return marked_; }
  /// int y nu_marked(dy), subtracted as drift so the marked part is compensated.
  double marked_mean() const { return marked_mean_; }
  /// int (e^y - 1) nu_marked(dy).
  double marked_exp_mean() const { return marked_exp_mean_; }
  /// Variance rate of the Gaussian small-jump replacement (0 when off).
  double small_jump_variance() const { return small_var_; }
  /// True when some jump component is sampled without marks.
  bool has_unmarked_part() const { return !unmarked_.empty(); }

 private:
  LevyModel model_;
  SimulationSpec spec_;
  Measure measure_;
  JumpMeasure marked_;
  std::vector<JumpComponent> unmarked_;
  std::vector<MertonJumps> merton_;
  std::vector<JumpTable> tables_;
  double marked_mean_ = 0.0;
  double marked_exp_mean_ = 0.0;
  double small_var_ = 0.0;
};

/// Cumulants kappa_1..kappa_order of X_1 (order <= 4) from the closed-form
/// derivatives of psi at 0.
std::vector<double> moments_from_psi(const LevyModel& model, int order);

/// Binary dump: "LCOP", u32 version, u64 seed, u64 paths, u64 steps, f64 T,
/// then per path u64 index, x[steps+1], dw[steps], u64 jumps, (time, size)
/// pairs. Little-endian throughout.
void write_path_dump(std::ostream& out, const std::vector<PathRecord>& paths,
                     std::uint64_t seed, double T);
std::vector<PathRecord> read_path_dump(std::istream& in);

/// CSV with one row per path: index, x_T, w_T, jumps.
void write_terminal_csv(std::ostream& out, const std::vector<PathRecord>& paths);

}  // namespace levyrep
