#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "dicke/execution.hpp"
#include "dicke/ladder.hpp"

namespace dicke {

/// Exact weight c0 + c1*tau of one exponential exp(-h tau), tau = gamma*t.
/// Simple poles have slope 0; only double poles carry the linear term.
struct AffineCoefficient {
  mpq_class intercept;
  mpq_class slope;

  bool operator==(const AffineCoefficient& o) const {
    return intercept == o.intercept && slope == o.slope;
  }
};

struct SpectralTerm {
  std::int64_t pole = 0;  ///< ladder factor h_j
  AffineCoefficient coeff;
};

/// rho_m(t) for the pure start |m0>, as a finite sum of
/// (intercept + slope*tau) * exp(-pole*tau) over distinct poles.
///
/// Terms are ordered by the largest ladder index carrying the pole, highest
/// first, which is the column order of CoefficientMatrix.
struct SpectralDecomposition {
  int m0 = 0;
  int m = 0;
  std::vector<SpectralTerm> terms;

  /// nullptr when the pole does not contribute.
  const AffineCoefficient* find(std::int64_t pole) const;
};

/// Lower-triangular coefficient matrix for one initial state |m0>.
struct CoefficientMatrix {
  int n = 0;
  int m0 = 0;
  /// Distinct poles of the window [1, m0], ordered by their largest index
  /// (highest first).
  std::vector<std::int64_t> poles;
  /// rows[i] describes rho_{m0-i}; i.e. rows run m = m0 .. 1.
  std::vector<SpectralDecomposition> rows;

  const SpectralDecomposition& row(int m) const;
};

/// Order-1 residue weight of pole h_j for the pair (m0, m):
///   (-1)^(m0-m) * h_{m0}...h_{m+1} / prod_{k in [m,m0], k != j} (h_j - h_k).
/// Requires m <= j <= m0 and h_j simple in [m, m0] (MultiplicityError otherwise).
mpq_class simple_coefficient(const LadderModel& model, int m0, int m, int j);

/// Order-2 residue at a degenerate pole h_j = h_{N+1-j}, both indices in
/// [m, m0].  With P~ the prefactor stripped of both (z - h_j) factors and
/// S = sum over the remaining k of 1/(h_j - h_k):  slope = -P~, intercept = -P~ S.
AffineCoefficient degenerate_coefficient(const LadderModel& model, int m0, int m, int j);

/// Same coefficient as degenerate_coefficient, built from the symmetry-folded
/// amplitude/shift pair obtained by splitting the degenerate pair by epsilon
/// and taking the limit.  Only defined for the fully inverted start m0 = N.
AffineCoefficient degenerate_coefficient_limit(const LadderModel& model, int m0, int m, int j);

/// Full closed form of rho_m(t) from |m0>, built pole by pole from the
/// routines above.  Requires 1 <= m <= m0 <= N.
SpectralDecomposition decompose(const LadderModel& model, int m0, int m);

/// All rows m = m0..1 at once, via a column recurrence over prime exponent
/// vectors (O(N) exact work per entry amortised to O(1) factor updates).
CoefficientMatrix coefficient_matrix(const LadderModel& model, int m0,
                                     Execution exec = Execution::parallel);

/// Decomposition of the ground population rho_0 from |m0> (window [0, m0],
/// with the extra simple pole h_0 = 0).  The evaluator uses it only to
/// measure the normalization residual; rho_0 itself comes from closure.
SpectralDecomposition ground_decomposition(const LadderModel& model, int m0,
                                           Execution exec = Execution::parallel);

/// "p/q" in lowest terms; integers render as "p/1".
std::string to_fraction(const mpq_class& q);

/// Parses "p/q" or an integer "p"; throws DomainError on malformed input or q = 0.
mpq_class parse_fraction(const std::string& text);

}  // namespace dicke
