#include "dicke/bigfloat.hpp"

#include <cmath>
#include <limits>

namespace dicke {

double BigFloat::log2_abs() const noexcept {
  if (mpfr_zero_p(v_)) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  const double mant = mpfr_get_d_2exp(&exp, v_, MPFR_RNDN);
  return std::log2(std::fabs(mant)) + static_cast<double>(exp);
}

}  // namespace dicke
