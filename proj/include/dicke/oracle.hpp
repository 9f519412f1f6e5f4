#pragma once

// Brute-force references for the closed form: the exact power series in
// the Lindbladian and direct integration of the diagonal master equation
//   d rho_m / d tau = -h_m rho_m + h_{m+1} rho_{m+1},   tau = gamma t.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "dicke/evaluator.hpp"
#include "dicke/ladder.hpp"

namespace dicke {

/// Integer coefficients rho_m^(j) of the series in tau for the start |m0>.
struct SeriesState {
  int n = 0;
  int m0 = 0;
  int order = 0;
  /// coefficients[j][m], 0 <= j <= order, 0 <= m <= m0.
  std::vector<std::vector<mpz_class>> coefficients;
};

SeriesState build_series(const LadderModel& model, int m0, int order);

struct SeriesResult {
  std::vector<double> populations;  ///< rho_0 .. rho_N
  double truncation_bound = 0.0;    ///< 10 x largest first omitted term
};

/// Largest tau = gamma t the series oracle accepts.
inline constexpr double kSeriesMaxTau = 0.5;

/// Partial sum of the series to the given order, summed exactly in rationals
/// and rounded once.  Requires gamma t <= 0.5 and order >= 1.
SeriesResult series_populations(const LadderModel& model, int m0, double t, int order);

struct OdeTolerances {
  double absolute = 1e-12;
  double relative = 1e-10;
};

/// Populations at each physical time of an ascending grid, integrated with
/// an adaptive Dormand-Prince 5(4) stepper.  Throws IntegrationError when the
/// stepper stalls.
std::vector<std::vector<double>> ode_trajectory(const LadderModel& model,
                                                const InitialState& state,
                                                const std::vector<double>& times,
                                                OdeTolerances tol = {});

std::vector<double> ode_populations(const LadderModel& model, const InitialState& state,
                                    double t, OdeTolerances tol = {});

struct ValidationCase {
  int n = 0;
  int m0 = 0;
  double t = 0.0;  ///< time of the largest discrepancy
  double max_abs_error = 0.0;
  std::string methods;  ///< "residue-ode" or "residue-series"
  std::string note;     ///< set when a case failed to evaluate
};

struct ValidationReport {
  std::vector<ValidationCase> cases;
  std::optional<ValidationCase> worst_case;
  double tolerance = 0.0;
  bool pass = true;
};

struct ValidationRequest {
  int n_min = 1;
  int n_max = 0;
  std::vector<double> taus;  ///< dimensionless times gamma t
  double tolerance = 1e-9;
  int series_order = 80;
};

/// count log-spaced points on [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int count);

/// Compares the residue path against both oracles for every N in range and
/// every pure start m0 <= N.  The series oracle is only consulted inside its
/// validity window.  Never throws for a failing case; failures are entries.
ValidationReport validate(const ValidationRequest& request, Execution exec = Execution::parallel);

}  // namespace dicke
