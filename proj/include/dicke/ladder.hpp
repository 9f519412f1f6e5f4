#pragma once

#include <cstdint>
#include <vector>

namespace dicke {

/// N identical emitters decaying collectively at rate gamma.
///
/// Dicke states |m>, m = 0..N, are coupled only downward: |m> -> |m-1> with
/// weight h_m = m(N+1-m).  The spectrum is symmetric, h_m = h_{N+1-m}, so the
/// ladder factors come in degenerate pairs except at the centre of an odd
/// ladder.
class LadderModel {
 public:
  /// Throws DomainError unless n >= 1 and gamma > 0 (and finite).
  LadderModel(int n, double gamma = 1.0);

  int n() const noexcept { return n_; }
  double gamma() const noexcept { return gamma_; }

  /// h_m = m(N+1-m); defined for 0 <= m <= N.
  std::int64_t ladder_factor(int m) const;

  /// N+1-m, the index sharing m's ladder factor; defined for 1 <= m <= N.
  int partner(int m) const;

  /// Index of the largest ladder factor, ceil((N+1)/2).
  int equator() const noexcept { return (n_ + 2) / 2; }

 private:
  int n_;
  double gamma_;
};

/// One distinct ladder factor inside an index window.
struct PoleEntry {
  std::int64_t value = 0;
  int multiplicity = 0;      ///< 1 or 2
  std::vector<int> indices;  ///< ascending ladder indices k with h_k == value
};

/// Distinct ladder factors of a window [m_low, m_high], ordered by their
/// smallest index.
struct PoleSet {
  std::vector<PoleEntry> entries;

  /// nullptr when the value does not occur in the window.
  const PoleEntry* find(std::int64_t value) const;
};

/// Groups indices of [m_low, m_high] by equal ladder factor.  Requires
/// 1 <= m_low <= m_high <= N.
PoleSet pole_spectrum(const LadderModel& model, int m_low, int m_high);

}  // namespace dicke
