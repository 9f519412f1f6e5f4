#include "prime_factors.hpp"

#include <cstdlib>
#include <stdexcept>

namespace dicke::detail {

PrimeTable::PrimeTable(int limit)
    : limit_(limit < 2 ? 2 : limit),
      smallest_factor_(limit_ + 1, 0),
      prime_index_(limit_ + 1, -1) {
  for (int i = 2; i <= limit_; ++i) {
    if (smallest_factor_[i] != 0) continue;
    prime_index_[i] = static_cast<int>(primes_.size());
    primes_.push_back(static_cast<unsigned long>(i));
    for (long k = i; k <= limit_; k += i)
      if (smallest_factor_[k] == 0) smallest_factor_[k] = i;
  }
}

void PrimeTable::accumulate(std::vector<int>& exps, std::int64_t value, int power) const {
  std::int64_t v = std::llabs(value);
  if (v == 0 || v > limit_) throw std::out_of_range("PrimeTable: factor outside sieve");
  while (v > 1) {
    const int p = smallest_factor_[v];
    exps[prime_index_[p]] += power;
    v /= p;
  }
}

mpq_class PrimeTable::materialize(const std::vector<int>& exps) const {
  mpz_class num = 1, den = 1, pw;
  for (std::size_t i = 0; i < primes_.size(); ++i) {
    const int e = exps[i];
    if (e == 0) continue;
    mpz_ui_pow_ui(pw.get_mpz_t(), primes_[i], static_cast<unsigned long>(e > 0 ? e : -e));
    if (e > 0)
      num *= pw;
    else
      den *= pw;
  }
  mpq_class q;
  mpz_swap(mpq_numref(q.get_mpq_t()), num.get_mpz_t());
  mpz_swap(mpq_denref(q.get_mpq_t()), den.get_mpz_t());
  return q;  // coprime by construction
}

}  // namespace dicke::detail
