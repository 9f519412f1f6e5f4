#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "dicke/execution.hpp"
#include "dicke/kernels.hpp"
#include "dicke/ladder.hpp"
#include "dicke/residue_engine.hpp"

namespace dicke {

/// Diagonal initial condition: a single Dicke state or a mixture.
class InitialState {
 public:
  static InitialState pure(int m0);
  /// weights[k] is the weight of |k>; must be >= 0 and sum to exactly 1.
  static InitialState mixed(std::vector<mpq_class> weights);
  /// Real weights, >= 0, summing to 1 within 1e-12.  Each double is taken
  /// at its exact binary value.
  static InitialState mixed(const std::vector<double>& weights);

  bool is_pure() const noexcept { return pure_m0_.has_value(); }
  /// Highest populated level.
  int top() const noexcept { return top_; }
  /// Nonzero weights as (k, w_k), ascending k.
  const std::vector<std::pair<int, mpq_class>>& support() const noexcept { return support_; }
  /// Dense weights 0..n; throws DomainError if a populated level exceeds n.
  std::vector<mpq_class> dense(int n) const;

 private:
  InitialState() = default;
  std::optional<int> pure_m0_;
  int top_ = 0;
  std::vector<std::pair<int, mpq_class>> support_;
};

struct PopulationSnapshot {
  double t = 0.0;
  std::vector<double> populations;  ///< rho_0 .. rho_N
  long achieved_precision = 0;      ///< bits of working precision accepted
  double normalization_residual = 0.0;  ///< |sum rho - 1| before rho_0 closure
};

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<PopulationSnapshot> snapshots;
};

struct PeakEmission {
  double t_peak = 0.0;
  double i_peak = 0.0;
};

struct EvaluatorOptions {
  /// Starting precision; default max(128, 2N).
  std::optional<long> precision_bits;
  Execution exec = Execution::parallel;
};

/// Acceptance thresholds of the adaptive precision loop.
inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr double kNegativityTolerance = 1e-12;
/// Per-row rounding-error budget; well inside the normalization tolerance.
inline constexpr double kRoundingBudget = 1e-13;

long default_precision(const LadderModel& model);
long precision_ceiling(const LadderModel& model);

/// Sum of (intercept + slope*tau) exp(-pole*tau) at tau = gamma*t, every
/// term taken from its exact coefficient at the requested precision.
double evaluate_population(const SpectralDecomposition& decomp, const LadderModel& model,
                           double t, long precision_bits);

/// Decompositions for one (model, initial state), built once and shared.
///
/// The exact rows are immutable after construction; floating-point plans
/// derived from them are cached per precision behind a mutex, so a
/// Propagator may be used from several threads.
class Propagator {
 public:
  Propagator(const LadderModel& model, const InitialState& state, EvaluatorOptions opts = {});

  const LadderModel& model() const noexcept { return model_; }
  const EvaluatorOptions& options() const noexcept { return opts_; }

  /// Exact decomposition of rho_m for 1 <= m <= N (mixture-weighted); an
  /// empty decomposition above the populated range.
  const SpectralDecomposition& row(int m) const;

  /// Populations at physical time t with adaptive precision.  Throws
  /// EvaluationError when the precision ceiling is reached.
  PopulationSnapshot snapshot(double t) const;

  /// Gamma * sum_m h_m rho_m(t) via the pre-aggregated per-pole weights.
  /// Same adaptive policy as snapshot(); returns (value, precision used).
  std::pair<double, long> intensity_at(double t) const;

 private:
  std::shared_ptr<const kernels::FloatPlan> plan_at(long precision) const;
  std::shared_ptr<const kernels::AggregatePlan> intensity_plan_at(long precision) const;

  LadderModel model_;
  EvaluatorOptions opts_;
  /// rows_[0] is the ground row (check only), rows_[m] is rho_m.
  std::vector<SpectralDecomposition> rows_;
  std::vector<double> initial_;  ///< start weights, returned as-is at t = 0
  mutable std::mutex cache_mutex_;
  mutable std::map<long, std::shared_ptr<const kernels::FloatPlan>> plans_;
  mutable std::map<long, std::shared_ptr<const kernels::AggregatePlan>> intensity_plans_;
};

PopulationSnapshot populations(const LadderModel& model, const InitialState& state, double t,
                               EvaluatorOptions opts = {});

/// One snapshot per grid point; grid must be strictly increasing and >= 0.
EvolutionTrace evolve(const LadderModel& model, const InitialState& state,
                      const std::vector<double>& grid, EvaluatorOptions opts = {});
EvolutionTrace evolve(const Propagator& prop, const std::vector<double>& grid);

/// Gamma * sum_m h_m rho_m.
double intensity(const LadderModel& model, const PopulationSnapshot& snapshot);

/// Global maximum of the intensity on [0, 10 ln(N+2)/(N gamma)]: a 64-point
/// scan brackets the maximum, golden-section search refines it to a relative
/// time tolerance of 1e-6.  A maximum at the left end returns t = 0.
PeakEmission peak_emission(const LadderModel& model, const InitialState& state,
                           EvaluatorOptions opts = {});
PeakEmission peak_emission(const Propagator& prop);

/// argmax_m rho_m, ties resolved toward the larger m.
int distribution_mode(const PopulationSnapshot& snapshot);

}  // namespace dicke
