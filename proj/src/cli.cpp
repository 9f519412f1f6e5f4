#include "dicke/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "dicke/errors.hpp"
#include "dicke/evaluator.hpp"
#include "dicke/io.hpp"
#include "dicke/oracle.hpp"
#include "dicke/residue_engine.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dicke::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  int n = 0;
  std::optional<int> m0;
  std::string weights_path;
  double gamma = 1.0;
  double t_start = 0.0;
  double t_end = 1.0;
  int steps = 11;
  std::string grid = "linear";
  std::optional<long> precision;
  std::string format = "json";
  std::string output;
  std::string save_weights;
  bool serial = false;
  int threads = 0;
  // validate
  int n_min = 1;
  int n_max = 0;
  double tol = 1e-9;
  double tau_min = 1e-3;
  double tau_max = 10.0;
  int points = 20;
  int series_order = 80;
  // bench
  std::vector<int> n_list;
};

io::Format parse_format(const std::string& s) {
  if (s == "csv") return io::Format::csv;
  if (s == "json") return io::Format::json;
  throw UsageError("--format must be csv or json");
}

LadderModel make_model(const Config& c) {
  if (c.n < 1) throw UsageError("--n must be >= 1");
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma)) throw UsageError("--gamma must be > 0");
  return LadderModel(c.n, c.gamma);
}

InitialState make_state(const Config& c, bool allow_mixed = true) {
  if (c.m0 && !c.weights_path.empty()) throw UsageError("give either --m0 or --weights, not both");
  if (c.m0) {
    if (*c.m0 < 1 || *c.m0 > c.n) throw UsageError("--m0 must lie in [1, N]");
    return InitialState::pure(*c.m0);
  }
  if (c.weights_path.empty() || !allow_mixed)
    throw UsageError(allow_mixed ? "one of --m0 or --weights is required" : "--m0 is required");
  try {
    auto w = io::read_weights_file(c.weights_path);
    if (w.size() > static_cast<std::size_t>(c.n) + 1)
      throw UsageError("weights file populates a level above N");
    return InitialState::mixed(std::move(w));
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::vector<double> make_grid(const Config& c) {
  if (c.steps < 1) throw UsageError("--steps must be >= 1");
  if (!(c.t_start >= 0.0)) throw UsageError("--t-start must be >= 0");
  if (c.steps > 1 && !(c.t_end > c.t_start)) throw UsageError("--t-end must exceed --t-start");
  std::vector<double> g(static_cast<std::size_t>(c.steps));
  if (c.grid == "linear") {
    for (int i = 0; i < c.steps; ++i)
      g[i] = c.steps == 1 ? c.t_start
                          : c.t_start + (c.t_end - c.t_start) * i / (c.steps - 1);
  } else if (c.grid == "log") {
    if (!(c.t_start > 0.0)) throw UsageError("log grids need --t-start > 0");
    g = log_grid(c.t_start, c.steps == 1 ? c.t_start : c.t_end, c.steps);
  } else {
    throw UsageError("--grid must be linear or log");
  }
  return g;
}

EvaluatorOptions make_options(const Config& c) {
  if (c.precision && *c.precision < 53) throw UsageError("--precision must be >= 53");
  return EvaluatorOptions{c.precision, c.serial ? Execution::serial : Execution::parallel};
}

io::RunHeader header(const Config& c, const InitialState& s) {
  io::RunHeader h;
  h.n = c.n;
  if (s.is_pure()) h.m0 = s.top();
  h.gamma = c.gamma;
  return h;
}

int cmd_evolve(const Config& c, std::ostream& doc) {
  const auto model = make_model(c);
  const auto state = make_state(c);
  const auto grid = make_grid(c);
  const auto fmt = parse_format(c.format);
  const Propagator prop(model, state, make_options(c));
  const auto trace = evolve(prop, grid);
  io::write_trace(doc, fmt, header(c, state), trace);
  if (!c.save_weights.empty()) {
    std::ofstream w(c.save_weights);
    if (!w) throw UsageError("cannot write '" + c.save_weights + "'");
    io::write_weights(w, io::weights_from_snapshot(trace.snapshots.back()));
  }
  return kSuccess;
}

int cmd_intensity(const Config& c, std::ostream& doc) {
  const auto model = make_model(c);
  const auto state = make_state(c);
  const auto grid = make_grid(c);
  const auto fmt = parse_format(c.format);
  const Propagator prop(model, state, make_options(c));
  std::vector<double> values;
  values.reserve(grid.size());
  for (double t : grid) values.push_back(prop.intensity_at(t).first);
  io::write_intensity(doc, fmt, header(c, state), grid, values);
  return kSuccess;
}

int cmd_peak(const Config& c, std::ostream& doc) {
  const auto model = make_model(c);
  const auto state = make_state(c);
  const auto fmt = parse_format(c.format);
  const Propagator prop(model, state, make_options(c));
  const auto peak = peak_emission(prop);
  const int mode = distribution_mode(prop.snapshot(peak.t_peak));
  io::write_peak(doc, fmt, header(c, state), peak, mode);
  return kSuccess;
}

int cmd_matrix(const Config& c, std::ostream& doc) {
  const auto model = make_model(c);
  const auto state = make_state(c, false);
  const auto fmt = parse_format(c.format);
  const auto mat = coefficient_matrix(model, state.top(), make_options(c).exec);
  io::write_matrix(doc, fmt, mat, c.gamma);
  return kSuccess;
}

int cmd_validate(const Config& c, std::ostream& doc) {
  if (c.n_max < 0 || c.n_min < 1) throw UsageError("--n-min must be >= 1 and --n-max >= 0");
  if (!(c.tol > 0.0)) throw UsageError("--tol must be > 0");
  if (c.points < 1) throw UsageError("--points must be >= 1");
  if (c.series_order < 1) throw UsageError("--series-order must be >= 1");
  const auto fmt = parse_format(c.format);
  ValidationRequest req;
  req.n_min = c.n_min;
  req.n_max = c.n_max;
  try {
    req.taus = log_grid(c.tau_min, c.tau_max, c.points);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  req.tolerance = c.tol;
  req.series_order = c.series_order;
  const auto report = validate(req, make_options(c).exec);
  io::write_report(doc, fmt, report);
  return report.pass ? kSuccess : kValidationFailed;
}

int cmd_bench(const Config& c, std::ostream& doc) {
  if (c.n_list.empty()) throw UsageError("--n-list is required");
  const auto fmt = parse_format(c.format);
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };
  std::vector<io::BenchRow> rows;
  for (int n : c.n_list) {
    if (n < 2) throw UsageError("--n-list entries must be >= 2");
    const LadderModel model(n, c.gamma);
    const auto state = InitialState::pure(n);
    io::BenchRow r;
    r.n = n;
    r.tau = std::log(static_cast<double>(n)) / n;
    const double t = r.tau / c.gamma;

    const auto t0 = Clock::now();
    const Propagator prop(model, state, make_options(c));
    const auto t1 = Clock::now();
    const auto snap = prop.snapshot(t);
    const auto t2 = Clock::now();
    const auto ode = ode_populations(model, state, t);
    const auto t3 = Clock::now();

    r.build_seconds = seconds(t0, t1);
    r.eval_seconds = seconds(t1, t2);
    r.ode_seconds = seconds(t2, t3);
    for (int m = 0; m <= n; ++m)
      r.max_abs_diff = std::max(r.max_abs_diff, std::fabs(snap.populations[m] - ode[m]));
    rows.push_back(r);
  }
  io::write_bench(doc, fmt, rows);
  return kSuccess;
}

void add_model_options(CLI::App* sub, Config& c) {
  sub->add_option("--n", c.n, "Number of emitters N")->required();
  sub->add_option("--gamma", c.gamma, "Collective decay rate (default 1)");
}

void add_state_options(CLI::App* sub, Config& c) {
  sub->add_option("--m0", c.m0, "Initial Dicke state (pure start)");
  sub->add_option("--weights", c.weights_path, "Mixed start: file of 'm<TAB>p/q' lines");
}

void add_grid_options(CLI::App* sub, Config& c) {
  sub->add_option("--t-start", c.t_start, "First time point");
  sub->add_option("--t-end", c.t_end, "Last time point");
  sub->add_option("--steps", c.steps, "Number of time points");
  sub->add_option("--grid", c.grid, "linear or log");
}

void add_output_options(CLI::App* sub, Config& c) {
  sub->add_option("--format", c.format, "csv or json (default json)");
  sub->add_option("--output", c.output, "Output file (default stdout)");
  sub->add_option("--precision", c.precision, "Starting working precision in bits");
  sub->add_flag("--serial", c.serial, "Use the serial reference kernels");
  sub->add_option("--threads", c.threads, "OpenMP threads (default: runtime choice)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Exact Dicke superradiance populations from residue sums", "dicke"};
  app.require_subcommand(1);

  auto* evolve_cmd = app.add_subcommand("evolve", "Populations on a time grid");
  auto* intensity_cmd = app.add_subcommand("intensity", "Emission intensity on a time grid");
  auto* peak_cmd = app.add_subcommand("peak", "Burst peak time, intensity and distribution mode");
  auto* matrix_cmd = app.add_subcommand("matrix", "Exact coefficient matrix export");
  auto* validate_cmd = app.add_subcommand("validate", "Residue path versus both oracles");
  auto* bench_cmd = app.add_subcommand("bench", "Residue path versus direct integration timings");

  for (auto* s : {evolve_cmd, intensity_cmd, peak_cmd, matrix_cmd}) {
    add_model_options(s, c);
    add_state_options(s, c);
    add_output_options(s, c);
  }
  add_grid_options(evolve_cmd, c);
  add_grid_options(intensity_cmd, c);
  evolve_cmd->add_option("--save-weights", c.save_weights,
                         "Write the final populations as a weights file");

  validate_cmd->add_option("--n-min", c.n_min, "Smallest N (default 1)");
  validate_cmd->add_option("--n-max", c.n_max, "Largest N")->required();
  validate_cmd->add_option("--tol", c.tol, "Absolute tolerance (default 1e-9)");
  validate_cmd->add_option("--tau-min", c.tau_min, "Smallest gamma*t (default 1e-3)");
  validate_cmd->add_option("--tau-max", c.tau_max, "Largest gamma*t (default 10)");
  validate_cmd->add_option("--points", c.points, "Log-spaced time points (default 20)");
  validate_cmd->add_option("--series-order", c.series_order, "Series order J (default 80)");
  add_output_options(validate_cmd, c);

  bench_cmd->add_option("--n-list", c.n_list, "Comma-separated system sizes")
      ->delimiter(',')
      ->required();
  bench_cmd->add_option("--gamma", c.gamma, "Collective decay rate (default 1)");
  add_output_options(bench_cmd, c);

  std::vector<const char*> argv{"dicke"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "dicke: " << e.what() << '\n';
    return kUsage;
  }

#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#endif

  std::ostringstream doc;
  int status = kSuccess;
  try {
    if (evolve_cmd->parsed())
      status = cmd_evolve(c, doc);
    else if (intensity_cmd->parsed())
      status = cmd_intensity(c, doc);
    else if (peak_cmd->parsed())
      status = cmd_peak(c, doc);
    else if (matrix_cmd->parsed())
      status = cmd_matrix(c, doc);
    else if (validate_cmd->parsed())
      status = cmd_validate(c, doc);
    else
      status = cmd_bench(c, doc);
  } catch (const UsageError& e) {
    err << "dicke: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "dicke: " << e.what() << '\n';
    return kUsage;
  } catch (const EvaluationError& e) {
    err << "{\"error\": \"evaluation failure\", \"message\": \"" << e.what()
        << "\", \"residual\": " << io::format_number(e.residual())
        << ", \"precision_bits\": " << e.precision_bits() << "}\n";
    return kEvaluationFailure;
  } catch (const IntegrationError& e) {
    err << "dicke: " << e.what() << " (reached gamma*t=" << io::format_number(e.achieved_tau())
        << ")\n";
    return kEvaluationFailure;
  }

  if (c.output.empty()) {
    out << doc.str();
  } else {
    std::ofstream f(c.output);
    if (!f) {
      err << "dicke: cannot write '" << c.output << "'\n";
      return kUsage;
    }
    f << doc.str();
  }
  return status;
}

}  // namespace dicke::cli
