#pragma once

// Exact products/quotients of small integers kept as prime exponent vectors.
// Every factor the residue kernels multiply by is bounded by N+1 in magnitude
// (h_j - h_k = (j-k)(N+1-j-k) and h_k = k(N+1-k)), so coefficients live in the
// multiplicative group generated by the primes <= N+1 and come out in lowest
// terms without a single gcd.

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace dicke::detail {

class PrimeTable {
 public:
  explicit PrimeTable(int limit);

  int limit() const noexcept { return limit_; }
  std::size_t size() const noexcept { return primes_.size(); }

  /// exps[i] += power * (exponent of primes_[i] in |value|); 1 <= |value| <= limit.
  void accumulate(std::vector<int>& exps, std::int64_t value, int power) const;

  /// Lowest-terms |q| for q = prod primes_[i]^exps[i].
  mpq_class materialize(const std::vector<int>& exps) const;

 private:
  int limit_;
  std::vector<int> smallest_factor_;
  std::vector<int> prime_index_;
  std::vector<unsigned long> primes_;
};

}  // namespace dicke::detail
