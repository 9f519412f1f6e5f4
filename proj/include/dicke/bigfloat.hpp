#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <utility>

namespace dicke {

/// Owning wrapper over mpfr_t with a fixed precision.
class BigFloat {
 public:
  explicit BigFloat(long precision_bits = 53) { mpfr_init2(v_, precision_bits); mpfr_set_zero(v_, 1); }
  BigFloat(long precision_bits, const mpq_class& q) : BigFloat(precision_bits) {
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(BigFloat o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  long precision() const noexcept { return mpfr_get_prec(v_); }
  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }

  /// log2|x|, -inf for zero.
  double log2_abs() const noexcept;

 private:
  mpfr_t v_;
};

}  // namespace dicke
