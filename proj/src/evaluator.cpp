#include "dicke/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

// ---------------------------------------------------------------- states

InitialState InitialState::pure(int m0) {
  if (m0 < 1) throw DomainError("pure initial state needs m0 >= 1, got " + std::to_string(m0));
  InitialState s;
  s.pure_m0_ = m0;
  s.top_ = m0;
  s.support_.emplace_back(m0, mpq_class(1));
  return s;
}

InitialState InitialState::mixed(std::vector<mpq_class> weights) {
  if (weights.empty()) throw DomainError("mixed initial state needs at least one weight");
  mpq_class total = 0;
  InitialState s;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (sgn(weights[k]) < 0)
      throw DomainError("negative weight for level " + std::to_string(k));
    total += weights[k];
    if (sgn(weights[k]) != 0) {
      s.support_.emplace_back(static_cast<int>(k), weights[k]);
      s.top_ = static_cast<int>(k);
    }
  }
  if (total != 1) throw DomainError("weights sum to " + to_fraction(total) + ", not 1");
  return s;
}

InitialState InitialState::mixed(const std::vector<double>& weights) {
  std::vector<mpq_class> exact;
  exact.reserve(weights.size());
  mpq_class total = 0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("weights must be finite and >= 0");
    exact.emplace_back(w);
    total += exact.back();
  }
  if (weights.empty() || abs(total - 1) > mpq_class(1, 1000000000000L))
    throw DomainError("weights must sum to 1 within 1e-12");
  for (auto& w : exact) w /= total;
  return mixed(std::move(exact));
}

std::vector<mpq_class> InitialState::dense(int n) const {
  if (top_ > n)
    throw DomainError("initial state populates level " + std::to_string(top_) +
                      " above N=" + std::to_string(n));
  std::vector<mpq_class> w(static_cast<std::size_t>(n) + 1, mpq_class(0));
  for (const auto& [k, wk] : support_) w[static_cast<std::size_t>(k)] = wk;
  return w;
}

// ------------------------------------------------------------- precision

long default_precision(const LadderModel& model) {
  return std::max<long>(128, 2L * model.n());
}

long precision_ceiling(const LadderModel& model) { return 64 * default_precision(model); }

double evaluate_population(const SpectralDecomposition& decomp, const LadderModel& model,
                           double t, long precision_bits) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evaluate_population: t must be >= 0");
  if (precision_bits < 53) throw DomainError("evaluate_population: precision below 53 bits");
  const auto plan = kernels::build_float_plan(std::span(&decomp, 1), precision_bits,
                                              Execution::serial);
  return kernels::evaluate_rows(plan, model.gamma() * t, Execution::serial).front().value;
}

// ------------------------------------------------------------ propagator

namespace {

void add_scaled(SpectralDecomposition& into, const SpectralDecomposition& from,
                const mpq_class& w) {
  for (const auto& t : from.terms) {
    auto it = std::find_if(into.terms.begin(), into.terms.end(),
                           [&](const SpectralTerm& x) { return x.pole == t.pole; });
    if (it == into.terms.end()) {
      into.terms.push_back(SpectralTerm{t.pole, {}});
      it = std::prev(into.terms.end());
    }
    it->coeff.intercept += w * t.coeff.intercept;
    it->coeff.slope += w * t.coeff.slope;
  }
}

void drop_zero_terms(SpectralDecomposition& d) {
  std::erase_if(d.terms, [](const SpectralTerm& t) {
    return sgn(t.coeff.intercept) == 0 && sgn(t.coeff.slope) == 0;
  });
}

}  // namespace

Propagator::Propagator(const LadderModel& model, const InitialState& state, EvaluatorOptions opts)
    : model_(model), opts_(opts) {
  const int n = model.n();
  if (state.top() > n)
    throw DomainError("initial state populates level " + std::to_string(state.top()) +
                      " above N=" + std::to_string(n));
  if (opts_.precision_bits && *opts_.precision_bits < 53)
    throw DomainError("precision override below 53 bits");
  initial_.reserve(static_cast<std::size_t>(n) + 1);
  for (const auto& w : state.dense(n)) initial_.push_back(w.get_d());
  rows_.resize(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    rows_[static_cast<std::size_t>(m)].m = m;
    rows_[static_cast<std::size_t>(m)].m0 = state.top();
  }

  if (state.is_pure()) {
    const int m0 = state.top();
    auto mat = coefficient_matrix(model, m0, opts_.exec);
    for (int m = 1; m <= m0; ++m)
      rows_[static_cast<std::size_t>(m)].terms =
          std::move(mat.rows[static_cast<std::size_t>(m0 - m)].terms);
    rows_[0].terms = ground_decomposition(model, m0, opts_.exec).terms;
    return;
  }

  for (const auto& [k, w] : state.support()) {
    if (k == 0) {
      add_scaled(rows_[0], SpectralDecomposition{0, 0, {SpectralTerm{0, {mpq_class(1), 0}}}}, w);
      continue;
    }
    const auto mat = coefficient_matrix(model, k, opts_.exec);
    for (int m = 1; m <= k; ++m) add_scaled(rows_[static_cast<std::size_t>(m)], mat.row(m), w);
    add_scaled(rows_[0], ground_decomposition(model, k, opts_.exec), w);
  }
  for (auto& r : rows_) drop_zero_terms(r);
}

const SpectralDecomposition& Propagator::row(int m) const {
  if (m < 1 || m > model_.n()) throw DomainError("Propagator::row: m outside [1, N]");
  return rows_[static_cast<std::size_t>(m)];
}

std::shared_ptr<const kernels::FloatPlan> Propagator::plan_at(long precision) const {
  std::lock_guard lock(cache_mutex_);
  if (auto it = plans_.find(precision); it != plans_.end()) return it->second;
  auto plan = std::make_shared<const kernels::FloatPlan>(
      kernels::build_float_plan(rows_, precision, opts_.exec));
  // keep the two most recent precisions; plans for large N are big
  while (plans_.size() >= 2) plans_.erase(plans_.begin());
  plans_.emplace(precision, plan);
  return plan;
}

std::shared_ptr<const kernels::AggregatePlan> Propagator::intensity_plan_at(long precision) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = intensity_plans_.find(precision); it != intensity_plans_.end())
      return it->second;
  }
  const auto plan = plan_at(precision);
  std::vector<std::int64_t> weights(rows_.size());
  for (std::size_t m = 0; m < rows_.size(); ++m)
    weights[m] = model_.ladder_factor(static_cast<int>(m));
  auto agg = std::make_shared<const kernels::AggregatePlan>(
      kernels::build_aggregate_plan(*plan, weights));
  std::lock_guard lock(cache_mutex_);
  intensity_plans_.emplace(precision, agg);
  return agg;
}

PopulationSnapshot Propagator::snapshot(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("snapshot: t must be finite and >= 0");
  const double tau = model_.gamma() * t;
  long precision = opts_.precision_bits.value_or(default_precision(model_));
  const long ceiling = std::max(precision_ceiling(model_), precision);
  double residual = 0.0;

  if (tau == 0.0) {  // the start itself, without rounding the cancelling sums
    PopulationSnapshot snap;
    snap.t = t;
    snap.achieved_precision = precision;
    snap.populations = initial_;
    long double excited = 0.0L;
    for (std::size_t m = 1; m < initial_.size(); ++m) excited += initial_[m];
    snap.populations[0] = static_cast<double>(1.0L - excited);
    return snap;
  }

  for (; precision <= ceiling; precision *= 2) {
    const auto plan = plan_at(precision);
    const auto values = kernels::evaluate_rows(*plan, tau, opts_.exec);

    long double total = 0.0L, excited = 0.0L;
    bool accepted = true;
    for (std::size_t m = 0; m < values.size(); ++m) {
      const double v = values[m].value;
      total += v;
      if (m >= 1) {
        excited += v;
        if (!(v >= -kNegativityTolerance && v <= 1.0 + kNegativityTolerance)) accepted = false;
      }
      if (kernels::rounding_error(values[m], precision) > kRoundingBudget) accepted = false;
    }
    residual = static_cast<double>(std::fabs(total - 1.0L));
    if (!(residual <= kNormalizationTolerance)) accepted = false;
    if (!accepted) continue;

    PopulationSnapshot snap;
    snap.t = t;
    snap.achieved_precision = precision;
    snap.normalization_residual = residual;
    snap.populations.resize(values.size());
    for (std::size_t m = 1; m < values.size(); ++m) snap.populations[m] = values[m].value;
    snap.populations[0] = static_cast<double>(1.0L - excited);
    return snap;
  }
  throw EvaluationError("populations: precision ceiling of " + std::to_string(ceiling) +
                            " bits reached; normalization residual " + std::to_string(residual),
                        residual, ceiling);
}

std::pair<double, long> Propagator::intensity_at(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("intensity: t must be finite and >= 0");
  const double tau = model_.gamma() * t;
  long precision = opts_.precision_bits.value_or(default_precision(model_));
  const long ceiling = std::max(precision_ceiling(model_), precision);
  for (; precision <= ceiling; precision *= 2) {
    const auto v = kernels::evaluate_aggregate(*intensity_plan_at(precision), tau);
    if (kernels::rounding_error(v, precision) <= kNormalizationTolerance * std::max(1.0, std::fabs(v.value)))
      return {model_.gamma() * v.value, precision};
  }
  throw EvaluationError("intensity: precision ceiling reached", 0.0, ceiling);
}

// ------------------------------------------------------------ front ends

PopulationSnapshot populations(const LadderModel& model, const InitialState& state, double t,
                               EvaluatorOptions opts) {
  return Propagator(model, state, opts).snapshot(t);
}

EvolutionTrace evolve(const Propagator& prop, const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
      throw DomainError("evolve: grid times must be finite and >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw DomainError("evolve: grid must be strictly increasing");
  }
  EvolutionTrace trace;
  trace.times = grid;
  trace.snapshots.reserve(grid.size());
  for (double t : grid) {
    try {
      trace.snapshots.push_back(prop.snapshot(t));
    } catch (const EvaluationError& e) {
      throw EvaluationError(std::string(e.what()) + " at t=" + std::to_string(t), e.residual(),
                            e.precision_bits());
    }
  }
  return trace;
}

EvolutionTrace evolve(const LadderModel& model, const InitialState& state,
                      const std::vector<double>& grid, EvaluatorOptions opts) {
  return evolve(Propagator(model, state, opts), grid);
}

double intensity(const LadderModel& model, const PopulationSnapshot& snapshot) {
  if (snapshot.populations.size() != static_cast<std::size_t>(model.n()) + 1)
    throw DomainError("intensity: snapshot size does not match N");
  long double sum = 0.0L;
  for (int m = 1; m <= model.n(); ++m)
    sum += static_cast<long double>(model.ladder_factor(m)) * snapshot.populations[m];
  return model.gamma() * static_cast<double>(sum);
}

PeakEmission peak_emission(const Propagator& prop) {
  const auto& model = prop.model();
  const double gamma = model.gamma();
  const int n = model.n();
  const double tau_max = 10.0 * std::log(n + 2.0) / n;
  auto f = [&](double tau) { return prop.intensity_at(tau / gamma).first; };

  constexpr int kScan = 64;
  std::vector<double> grid(kScan), values(kScan);
  int best = 0;
  for (int i = 0; i < kScan; ++i) {
    grid[i] = tau_max * i / (kScan - 1);
    values[i] = f(grid[i]);
    if (values[i] > values[best]) best = i;
  }

  double lo = grid[std::max(best - 1, 0)];
  double hi = grid[std::min(best + 1, kScan - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  const double floor_width = 1e-12 * tau_max;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= std::max(1e-6 * mid, floor_width)) break;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  double tau_peak = 0.5 * (lo + hi);
  double i_peak = f(tau_peak);
  if (best == 0 && i_peak <= values[0]) {
    tau_peak = 0.0;
    i_peak = values[0];
  }
  return PeakEmission{tau_peak / gamma, i_peak};
}

PeakEmission peak_emission(const LadderModel& model, const InitialState& state,
                           EvaluatorOptions opts) {
  return peak_emission(Propagator(model, state, opts));
}

int distribution_mode(const PopulationSnapshot& snapshot) {
  if (snapshot.populations.empty()) throw DomainError("distribution_mode: empty snapshot");
  int mode = 0;
  for (std::size_t m = 1; m < snapshot.populations.size(); ++m)
    if (snapshot.populations[m] >= snapshot.populations[static_cast<std::size_t>(mode)])
      mode = static_cast<int>(m);
  return mode;
}

}  // namespace dicke
