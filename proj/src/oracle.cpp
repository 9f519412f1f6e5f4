#include "dicke/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "dicke/errors.hpp"

namespace dicke {

SeriesState build_series(const LadderModel& model, int m0, int order) {
  if (m0 < 1 || m0 > model.n()) throw DomainError("build_series: m0 outside [1, N]");
  if (order < 0) throw DomainError("build_series: negative order");
  SeriesState s{model.n(), m0, order, {}};
  s.coefficients.assign(static_cast<std::size_t>(order) + 1,
                        std::vector<mpz_class>(static_cast<std::size_t>(m0) + 1, mpz_class(0)));
  s.coefficients[0][static_cast<std::size_t>(m0)] = 1;
  for (int j = 0; j < order; ++j) {
    const auto& cur = s.coefficients[static_cast<std::size_t>(j)];
    auto& next = s.coefficients[static_cast<std::size_t>(j) + 1];
    for (int m = 0; m <= m0; ++m) {
      next[m] = -model.ladder_factor(m) * cur[m];
      if (m < m0) next[m] += model.ladder_factor(m + 1) * cur[m + 1];
    }
  }
  return s;
}

SeriesResult series_populations(const LadderModel& model, int m0, double t, int order) {
  if (order < 1) throw DomainError("series_populations: order must be >= 1");
  const double tau = model.gamma() * t;
  if (!(tau >= 0.0) || tau > kSeriesMaxTau)
    throw DomainError("series_populations: gamma*t=" + std::to_string(tau) +
                      " outside the series window [0, 0.5]");
  const auto series = build_series(model, m0, order + 1);
  const mpq_class x(tau);

  std::vector<mpq_class> sums(static_cast<std::size_t>(m0) + 1, mpq_class(0));
  mpq_class weight = 1;  // x^j / j!
  for (int j = 0; j <= order; ++j) {
    for (int m = 0; m <= m0; ++m) sums[m] += weight * series.coefficients[j][m];
    weight *= x;
    weight /= j + 1;
  }
  mpq_class omitted = 0;
  for (int m = 0; m <= m0; ++m)
    omitted = std::max(omitted, mpq_class(abs(weight * series.coefficients[order + 1][m])));

  SeriesResult r;
  r.populations.assign(static_cast<std::size_t>(model.n()) + 1, 0.0);
  for (int m = 0; m <= m0; ++m) r.populations[m] = sums[m].get_d();
  r.truncation_bound = 10.0 * omitted.get_d();
  return r;
}

std::vector<std::vector<double>> ode_trajectory(const LadderModel& model,
                                                const InitialState& state,
                                                const std::vector<double>& times,
                                                OdeTolerances tol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  const int n = model.n();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i]))
      throw DomainError("ode_trajectory: times must be finite and >= 0");
    if (i > 0 && times[i] < times[i - 1])
      throw DomainError("ode_trajectory: times must be ascending");
  }
  std::vector<std::vector<double>> out;
  if (times.empty()) return out;

  const auto weights = state.dense(n);
  State x(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) x[m] = weights[m].get_d();
  std::vector<double> h(static_cast<std::size_t>(n) + 2, 0.0);
  for (int m = 0; m <= n; ++m) h[m] = static_cast<double>(model.ladder_factor(m));

  double reached = 0.0;
  auto rhs = [&](const State& y, State& dy, double tau) {
    reached = std::max(reached, tau);
    for (int m = 0; m < n; ++m) dy[m] = -h[m] * y[m] + h[m + 1] * y[m + 1];
    dy[n] = -h[n] * y[n];
  };

  std::vector<double> taus;
  taus.reserve(times.size() + 1);
  taus.push_back(0.0);
  for (double t : times) taus.push_back(model.gamma() * t);
  std::size_t next = 0;
  auto observe = [&](const State& y, double) {
    if (next++ == 0) return;  // the tau = 0 seed
    out.push_back(y);
  };

  const double h_max = *std::max_element(h.begin(), h.end());
  auto stepper = odeint::make_controlled(tol.absolute, tol.relative,
                                         odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, x, taus.begin(), taus.end(), 0.1 / h_max, observe,
                            odeint::max_step_checker(1000000));
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("ODE oracle stalled: ") + e.what(), reached);
  }
  return out;
}

std::vector<double> ode_populations(const LadderModel& model, const InitialState& state,
                                    double t, OdeTolerances tol) {
  return ode_trajectory(model, state, {t}, tol).front();
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw DomainError("log_grid: need 0 < lo <= hi");
  std::vector<double> g(static_cast<std::size_t>(count));
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) g[i] = std::exp(a + (b - a) * i / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {

struct CaseResult {
  ValidationCase ode;
  std::optional<ValidationCase> series;
};

CaseResult run_case(int n, int m0, const std::vector<double>& taus, int order) {
  CaseResult r;
  r.ode = ValidationCase{n, m0, 0.0, 0.0, "residue-ode", ""};
  try {
    const LadderModel model(n);
    const auto state = InitialState::pure(m0);
    const Propagator prop(model, state, EvaluatorOptions{std::nullopt, Execution::serial});
    const auto ode = ode_trajectory(model, state, taus);

    ValidationCase series_case{n, m0, 0.0, 0.0, "residue-series", ""};
    bool any_series = false;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const auto snap = prop.snapshot(taus[i]);
      for (int m = 0; m <= n; ++m) {
        const double e = std::fabs(snap.populations[m] - ode[i][m]);
        if (!(e <= r.ode.max_abs_error)) {
          r.ode.max_abs_error = e;
          r.ode.t = taus[i];
        }
      }
      if (taus[i] <= kSeriesMaxTau) {
        any_series = true;
        const auto ser = series_populations(model, m0, taus[i], order);
        for (int m = 0; m <= n; ++m) {
          const double e = std::fabs(snap.populations[m] - ser.populations[m]);
          if (!(e <= series_case.max_abs_error)) {
            series_case.max_abs_error = e;
            series_case.t = taus[i];
          }
        }
      }
    }
    if (any_series) r.series = series_case;
  } catch (const std::exception& e) {
    r.ode.max_abs_error = std::numeric_limits<double>::infinity();
    r.ode.note = e.what();
  }
  return r;
}

}  // namespace

ValidationReport validate(const ValidationRequest& request, Execution exec) {
  ValidationReport report;
  report.tolerance = request.tolerance;
  std::vector<double> taus = request.taus;
  std::sort(taus.begin(), taus.end());

  std::vector<std::pair<int, int>> work;
  for (int n = std::max(1, request.n_min); n <= request.n_max; ++n)
    for (int m0 = 1; m0 <= n; ++m0) work.emplace_back(n, m0);

  std::vector<CaseResult> results(work.size());
  const long count = static_cast<long>(work.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i)
      results[i] = run_case(work[i].first, work[i].second, taus, request.series_order);
  } else {
    for (long i = 0; i < count; ++i)
      results[i] = run_case(work[i].first, work[i].second, taus, request.series_order);
  }

  for (auto& r : results) {
    report.cases.push_back(std::move(r.ode));
    if (r.series) report.cases.push_back(std::move(*r.series));
  }
  for (const auto& c : report.cases) {
    if (!report.worst_case || !(c.max_abs_error <= report.worst_case->max_abs_error))
      report.worst_case = c;
    if (!(c.max_abs_error <= request.tolerance)) report.pass = false;
  }
  return report;
}

}  // namespace dicke
