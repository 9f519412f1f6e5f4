#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dicke/evaluator.hpp"
#include "dicke/oracle.hpp"
#include "dicke/residue_engine.hpp"

namespace dicke::io {

enum class Format { csv, json };

/// Shared header fields of every evolution-style document.
struct RunHeader {
  int n = 0;
  std::optional<int> m0;  ///< empty for mixed starts
  double gamma = 1.0;
};

/// 17 significant digits, "%.17g".
std::string format_number(double x);

/// CSV: header t,rho_0,...,rho_N then one row per snapshot.
/// JSON: {"n","m0","gamma","times","populations",...}.
void write_trace(std::ostream& os, Format f, const RunHeader& h, const EvolutionTrace& trace);

void write_intensity(std::ostream& os, Format f, const RunHeader& h,
                     const std::vector<double>& times, const std::vector<double>& values);

void write_peak(std::ostream& os, Format f, const RunHeader& h, const PeakEmission& peak,
                int mode);

/// Exact coefficient matrix: poles in decreasing order, each row's terms as
/// (pole, intercept "p/q", slope "p/q" omitted when zero).
void write_matrix(std::ostream& os, Format f, const CoefficientMatrix& mat, double gamma);

void write_report(std::ostream& os, Format f, const ValidationReport& report);

struct BenchRow {
  int n = 0;
  double build_seconds = 0.0;
  double eval_seconds = 0.0;
  double ode_seconds = 0.0;
  double max_abs_diff = 0.0;  ///< residue vs ODE populations at the sampled time
  double tau = 0.0;           ///< sampled time gamma t = ln N / N
};

void write_bench(std::ostream& os, Format f, const std::vector<BenchRow>& rows);

/// Weights file: lines "m<TAB>p/q", '#' starts a comment.  Returns dense
/// weights indexed by level (missing levels are 0).  Throws DomainError on
/// malformed lines or repeated levels.
std::vector<mpq_class> read_weights(std::istream& is);
std::vector<mpq_class> read_weights_file(const std::string& path);

/// Writes every nonzero weight, ascending level.
void write_weights(std::ostream& os, const std::vector<mpq_class>& weights);

/// Exact weights of a snapshot: rho_1..rho_N at their binary values
/// (negatives clamped to 0), rho_0 closing the sum to exactly 1.
std::vector<mpq_class> weights_from_snapshot(const PopulationSnapshot& snap);

}  // namespace dicke::io
