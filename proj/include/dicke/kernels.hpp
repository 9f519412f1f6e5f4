#pragma once

// Floating-point kernels behind the evaluator.  Each kernel has a serial
// reference path and an OpenMP path selected by Execution; the two perform
// the same operations in the same order per output element, so their
// results are bit-identical.

#include <cstdint>
#include <span>
#include <vector>

#include "dicke/bigfloat.hpp"
#include "dicke/execution.hpp"
#include "dicke/residue_engine.hpp"

namespace dicke::kernels {

struct FloatTerm {
  std::uint32_t slot = 0;  ///< index into FloatPlan::poles
  bool has_slope = false;
  BigFloat intercept;
  BigFloat slope{MPFR_PREC_MIN};
};

/// Exact decompositions rounded once to a working precision.
struct FloatPlan {
  long precision = 0;
  std::vector<std::int64_t> poles;
  std::vector<std::vector<FloatTerm>> rows;
};

FloatPlan build_float_plan(std::span<const SpectralDecomposition> rows, long precision,
                           Execution exec);

/// One evaluated sum, rounded to double, with the data needed to bound its
/// rounding error.
struct RowValue {
  double value = 0.0;
  double abs_log2 = 0.0;  ///< log2 of the sum of |term|
  int depth = 0;          ///< number of rounding steps feeding each term
};

/// Upper estimate of the absolute rounding error of a RowValue evaluated at
/// the given precision: sum|term| * (depth + 4) * 2^-precision.
double rounding_error(const RowValue& v, long precision);

/// exp(-pole * tau) for every pole slot, at the plan's precision.
std::vector<BigFloat> exponentials(const FloatPlan& plan, double tau, Execution exec);

/// Sum of (intercept + slope*tau) * exp(-pole*tau) for every row.
std::vector<RowValue> evaluate_rows(const FloatPlan& plan, double tau, Execution exec);

/// Per-pole weights of sum_m w_m rho_m (e.g. w_m = h_m for the intensity),
/// pre-aggregated so the observable costs one pass over the poles.
struct AggregatePlan {
  long precision = 0;
  int depth = 0;
  std::vector<std::int64_t> poles;
  std::vector<BigFloat> intercept, slope;
  std::vector<BigFloat> abs_intercept, abs_slope;  // 64-bit, rounded up
};

AggregatePlan build_aggregate_plan(const FloatPlan& plan, std::span<const std::int64_t> row_weights);

RowValue evaluate_aggregate(const AggregatePlan& plan, double tau);

}  // namespace dicke::kernels
