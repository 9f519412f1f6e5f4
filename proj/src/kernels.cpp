#include "dicke/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace dicke::kernels {

namespace {

constexpr long kBoundBits = 64;

std::unordered_map<std::int64_t, std::uint32_t> index_poles(
    std::span<const SpectralDecomposition> rows, std::vector<std::int64_t>& poles) {
  std::unordered_map<std::int64_t, std::uint32_t> slot;
  for (const auto& r : rows)
    for (const auto& t : r.terms)
      if (slot.emplace(t.pole, static_cast<std::uint32_t>(poles.size())).second)
        poles.push_back(t.pole);
  return slot;
}

std::vector<FloatTerm> convert_row(const SpectralDecomposition& row, long precision,
                                   const std::unordered_map<std::int64_t, std::uint32_t>& slot) {
  std::vector<FloatTerm> out;
  out.reserve(row.terms.size());
  for (const auto& t : row.terms) {
    FloatTerm f;
    f.slot = slot.at(t.pole);
    f.intercept = BigFloat(precision, t.coeff.intercept);
    if (sgn(t.coeff.slope) != 0) {
      f.has_slope = true;
      f.slope = BigFloat(precision, t.coeff.slope);
    }
    out.push_back(std::move(f));
  }
  return out;
}

/// Sums one row; temporaries are supplied by the caller so each thread
/// reuses its own.
RowValue sum_row(const std::vector<FloatTerm>& row, const std::vector<BigFloat>& exps,
                 const BigFloat& tau, BigFloat& acc, BigFloat& term, BigFloat& abs_acc,
                 BigFloat& bound) {
  mpfr_set_zero(acc.get(), 1);
  mpfr_set_zero(abs_acc.get(), 1);
  for (const auto& t : row) {
    const auto e = exps[t.slot].get();
    if (t.has_slope) {
      mpfr_mul(term.get(), t.slope.get(), tau.get(), MPFR_RNDN);
      mpfr_add(term.get(), term.get(), t.intercept.get(), MPFR_RNDN);
      mpfr_mul(term.get(), term.get(), e, MPFR_RNDN);
      // (|a| + |b| tau) e: the affine part can cancel internally too
      mpfr_mul(bound.get(), t.slope.get(), tau.get(), MPFR_RNDU);
      mpfr_abs(bound.get(), bound.get(), MPFR_RNDU);
      if (mpfr_sgn(t.intercept.get()) >= 0)
        mpfr_add(bound.get(), bound.get(), t.intercept.get(), MPFR_RNDU);
      else
        mpfr_sub(bound.get(), bound.get(), t.intercept.get(), MPFR_RNDU);
      mpfr_mul(bound.get(), bound.get(), e, MPFR_RNDU);
    } else {
      mpfr_mul(term.get(), t.intercept.get(), e, MPFR_RNDN);
      mpfr_abs(bound.get(), term.get(), MPFR_RNDU);
    }
    mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
    mpfr_add(abs_acc.get(), abs_acc.get(), bound.get(), MPFR_RNDU);
  }
  RowValue v;
  v.value = acc.to_double();
  v.abs_log2 = abs_acc.log2_abs();
  v.depth = static_cast<int>(row.size()) + 4;
  return v;
}

}  // namespace

FloatPlan build_float_plan(std::span<const SpectralDecomposition> rows, long precision,
                           Execution exec) {
  if (precision < 53) throw std::invalid_argument("build_float_plan: precision below 53 bits");
  FloatPlan plan;
  plan.precision = precision;
  const auto slot = index_poles(rows, plan.poles);
  plan.rows.resize(rows.size());
  const long count = static_cast<long>(rows.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < count; ++i) plan.rows[i] = convert_row(rows[i], precision, slot);
  } else {
    for (long i = 0; i < count; ++i) plan.rows[i] = convert_row(rows[i], precision, slot);
  }
  return plan;
}

double rounding_error(const RowValue& v, long precision) {
  if (std::isinf(v.abs_log2) && v.abs_log2 < 0) return 0.0;
  return std::exp2(v.abs_log2 + std::log2(static_cast<double>(v.depth)) -
                   static_cast<double>(precision));
}

std::vector<BigFloat> exponentials(const FloatPlan& plan, double tau, Execution exec) {
  std::vector<BigFloat> exps(plan.poles.size(), BigFloat(plan.precision));
  const long count = static_cast<long>(plan.poles.size());
  auto one = [&](long i) {
    // pole * tau needs at most 64 + 53 bits, so the exponent is exact
    BigFloat arg(plan.precision);
    mpfr_set_d(arg.get(), tau, MPFR_RNDN);
    mpfr_mul_si(arg.get(), arg.get(), -static_cast<long>(plan.poles[i]), MPFR_RNDN);
    mpfr_exp(exps[i].get(), arg.get(), MPFR_RNDN);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < count; ++i) one(i);
  } else {
    for (long i = 0; i < count; ++i) one(i);
  }
  return exps;
}

std::vector<RowValue> evaluate_rows(const FloatPlan& plan, double tau, Execution exec) {
  const auto exps = exponentials(plan, tau, exec);
  BigFloat tau_mp(plan.precision);
  mpfr_set_d(tau_mp.get(), tau, MPFR_RNDN);

  std::vector<RowValue> out(plan.rows.size());
  const long count = static_cast<long>(plan.rows.size());
  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      BigFloat acc(plan.precision), term(plan.precision), abs_acc(kBoundBits), bound(kBoundBits);
#pragma omp for schedule(dynamic, 4)
      for (long i = 0; i < count; ++i)
        out[i] = sum_row(plan.rows[i], exps, tau_mp, acc, term, abs_acc, bound);
    }
  } else {
    BigFloat acc(plan.precision), term(plan.precision), abs_acc(kBoundBits), bound(kBoundBits);
    for (long i = 0; i < count; ++i)
      out[i] = sum_row(plan.rows[i], exps, tau_mp, acc, term, abs_acc, bound);
  }
  return out;
}

AggregatePlan build_aggregate_plan(const FloatPlan& plan, std::span<const std::int64_t> row_weights) {
  if (row_weights.size() != plan.rows.size())
    throw std::invalid_argument("build_aggregate_plan: one weight per row required");
  AggregatePlan agg;
  agg.precision = plan.precision;
  agg.poles = plan.poles;
  const std::size_t slots = plan.poles.size();
  agg.intercept.assign(slots, BigFloat(plan.precision));
  agg.slope.assign(slots, BigFloat(plan.precision));
  agg.abs_intercept.assign(slots, BigFloat(kBoundBits));
  agg.abs_slope.assign(slots, BigFloat(kBoundBits));
  std::vector<int> fan_in(slots, 0);

  BigFloat prod(plan.precision);
  auto add = [&](BigFloat& sum, BigFloat& abs_sum, const BigFloat& c, std::int64_t w) {
    mpfr_mul_si(prod.get(), c.get(), static_cast<long>(w), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), prod.get(), MPFR_RNDN);
    if (mpfr_sgn(prod.get()) >= 0)
      mpfr_add(abs_sum.get(), abs_sum.get(), prod.get(), MPFR_RNDU);
    else
      mpfr_sub(abs_sum.get(), abs_sum.get(), prod.get(), MPFR_RNDU);
  };
  for (std::size_t r = 0; r < plan.rows.size(); ++r) {
    const std::int64_t w = row_weights[r];
    if (w == 0) continue;
    for (const auto& t : plan.rows[r]) {
      add(agg.intercept[t.slot], agg.abs_intercept[t.slot], t.intercept, w);
      if (t.has_slope) add(agg.slope[t.slot], agg.abs_slope[t.slot], t.slope, w);
      ++fan_in[t.slot];
    }
  }
  int deepest = 0;
  for (int f : fan_in) deepest = std::max(deepest, f);
  agg.depth = deepest + static_cast<int>(slots) + 8;
  return agg;
}

RowValue evaluate_aggregate(const AggregatePlan& plan, double tau) {
  const long p = plan.precision;
  BigFloat tau_mp(p), arg(p), e(p), term(p), acc(p), abs_acc(kBoundBits), bound(kBoundBits);
  mpfr_set_d(tau_mp.get(), tau, MPFR_RNDN);
  for (std::size_t i = 0; i < plan.poles.size(); ++i) {
    mpfr_mul_si(arg.get(), tau_mp.get(), -static_cast<long>(plan.poles[i]), MPFR_RNDN);
    mpfr_exp(e.get(), arg.get(), MPFR_RNDN);
    mpfr_mul(term.get(), plan.slope[i].get(), tau_mp.get(), MPFR_RNDN);
    mpfr_add(term.get(), term.get(), plan.intercept[i].get(), MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), e.get(), MPFR_RNDN);
    mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
    // (|A| + tau |B|) e bounds the pre-cancellation magnitude of this pole
    mpfr_mul(bound.get(), plan.abs_slope[i].get(), tau_mp.get(), MPFR_RNDU);
    mpfr_add(bound.get(), bound.get(), plan.abs_intercept[i].get(), MPFR_RNDU);
    mpfr_mul(bound.get(), bound.get(), e.get(), MPFR_RNDU);
    mpfr_add(abs_acc.get(), abs_acc.get(), bound.get(), MPFR_RNDU);
  }
  RowValue v;
  v.value = acc.to_double();
  v.abs_log2 = abs_acc.log2_abs();
  v.depth = plan.depth;
  return v;
}

}  // namespace dicke::kernels
