#include "dicke/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "dicke/errors.hpp"
#include "json.hpp"

namespace dicke::io {

using nlohmann::ordered_json;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

ordered_json header_json(const RunHeader& h) {
  ordered_json j;
  j["n"] = h.n;
  j["m0"] = h.m0 ? ordered_json(*h.m0) : ordered_json(nullptr);
  j["gamma"] = h.gamma;
  return j;
}

void dump(std::ostream& os, const ordered_json& j) { os << j.dump(2) << '\n'; }

}  // namespace

void write_trace(std::ostream& os, Format f, const RunHeader& h, const EvolutionTrace& trace) {
  if (f == Format::csv) {
    os << 't';
    for (int m = 0; m <= h.n; ++m) os << ",rho_" << m;
    os << '\n';
    for (const auto& s : trace.snapshots) {
      os << format_number(s.t);
      for (double p : s.populations) os << ',' << format_number(p);
      os << '\n';
    }
    return;
  }
  auto j = header_json(h);
  j["times"] = trace.times;
  ordered_json pops = ordered_json::array(), prec = ordered_json::array(),
               resid = ordered_json::array();
  for (const auto& s : trace.snapshots) {
    pops.push_back(s.populations);
    prec.push_back(s.achieved_precision);
    resid.push_back(s.normalization_residual);
  }
  j["populations"] = std::move(pops);
  j["precision_bits"] = std::move(prec);
  j["normalization_residual"] = std::move(resid);
  dump(os, j);
}

void write_intensity(std::ostream& os, Format f, const RunHeader& h,
                     const std::vector<double>& times, const std::vector<double>& values) {
  if (f == Format::csv) {
    os << "t,intensity\n";
    for (std::size_t i = 0; i < times.size(); ++i)
      os << format_number(times[i]) << ',' << format_number(values[i]) << '\n';
    return;
  }
  auto j = header_json(h);
  j["times"] = times;
  j["intensity"] = values;
  dump(os, j);
}

void write_peak(std::ostream& os, Format f, const RunHeader& h, const PeakEmission& peak,
                int mode) {
  if (f == Format::csv) {
    os << "t_peak,i_peak,mode\n"
       << format_number(peak.t_peak) << ',' << format_number(peak.i_peak) << ',' << mode << '\n';
    return;
  }
  auto j = header_json(h);
  j["t_peak"] = peak.t_peak;
  j["i_peak"] = peak.i_peak;
  j["mode"] = mode;
  dump(os, j);
}

void write_matrix(std::ostream& os, Format f, const CoefficientMatrix& mat, double gamma) {
  std::vector<std::int64_t> poles = mat.poles;
  std::sort(poles.begin(), poles.end(), std::greater<>());

  auto sorted_terms = [](const SpectralDecomposition& row) {
    std::vector<const SpectralTerm*> terms;
    for (const auto& t : row.terms) terms.push_back(&t);
    std::sort(terms.begin(), terms.end(),
              [](const SpectralTerm* a, const SpectralTerm* b) { return a->pole > b->pole; });
    return terms;
  };

  if (f == Format::csv) {
    os << "# n=" << mat.n << " m0=" << mat.m0 << " gamma=" << format_number(gamma) << '\n';
    os << "m,pole,intercept,slope\n";
    for (const auto& row : mat.rows)
      for (const auto* t : sorted_terms(row)) {
        os << row.m << ',' << t->pole << ',' << to_fraction(t->coeff.intercept) << ',';
        if (sgn(t->coeff.slope) != 0) os << to_fraction(t->coeff.slope);
        os << '\n';
      }
    return;
  }
  ordered_json j;
  j["n"] = mat.n;
  j["m0"] = mat.m0;
  j["gamma"] = gamma;
  j["poles"] = poles;
  ordered_json rows = ordered_json::array();
  for (const auto& row : mat.rows) {
    ordered_json r;
    r["m"] = row.m;
    ordered_json terms = ordered_json::array();
    for (const auto* t : sorted_terms(row)) {
      ordered_json term;
      term["pole"] = t->pole;
      term["intercept"] = to_fraction(t->coeff.intercept);
      if (sgn(t->coeff.slope) != 0) term["slope"] = to_fraction(t->coeff.slope);
      terms.push_back(std::move(term));
    }
    r["terms"] = std::move(terms);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  dump(os, j);
}

void write_report(std::ostream& os, Format f, const ValidationReport& report) {
  if (f == Format::csv) {
    os << "n,m0,t,max_abs_error,methods,pass\n";
    for (const auto& c : report.cases)
      os << c.n << ',' << c.m0 << ',' << format_number(c.t) << ','
         << format_number(c.max_abs_error) << ',' << c.methods << ','
         << (c.max_abs_error <= report.tolerance ? "true" : "false") << '\n';
    return;
  }
  auto case_json = [](const ValidationCase& c) {
    ordered_json j;
    j["n"] = c.n;
    j["m0"] = c.m0;
    j["t"] = c.t;
    // JSON has no infinity; a failed evaluation is reported as null
    j["max_abs_error"] = std::isfinite(c.max_abs_error) ? ordered_json(c.max_abs_error)
                                                        : ordered_json(nullptr);
    j["methods"] = c.methods;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
  };
  ordered_json j;
  j["tolerance"] = report.tolerance;
  j["pass"] = report.pass;
  j["worst_case"] = report.worst_case ? case_json(*report.worst_case) : ordered_json(nullptr);
  ordered_json cases = ordered_json::array();
  for (const auto& c : report.cases) cases.push_back(case_json(c));
  j["cases"] = std::move(cases);
  dump(os, j);
}

void write_bench(std::ostream& os, Format f, const std::vector<BenchRow>& rows) {
  if (f == Format::csv) {
    os << "n,tau,build_seconds,eval_seconds,ode_seconds,max_abs_diff\n";
    for (const auto& r : rows)
      os << r.n << ',' << format_number(r.tau) << ',' << format_number(r.build_seconds) << ','
         << format_number(r.eval_seconds) << ',' << format_number(r.ode_seconds) << ','
         << format_number(r.max_abs_diff) << '\n';
    return;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["n"] = r.n;
    j["tau"] = r.tau;
    j["build_seconds"] = r.build_seconds;
    j["eval_seconds"] = r.eval_seconds;
    j["ode_seconds"] = r.ode_seconds;
    j["max_abs_diff"] = r.max_abs_diff;
    arr.push_back(std::move(j));
  }
  ordered_json j;
  j["rows"] = std::move(arr);
  dump(os, j);
}

std::vector<mpq_class> read_weights(std::istream& is) {
  std::map<int, mpq_class> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string level_text, weight_text, extra;
    if (!(ls >> level_text)) continue;
    if (!(ls >> weight_text) || (ls >> extra))
      throw DomainError("weights line " + std::to_string(lineno) + ": expected 'm<TAB>p/q'");
    std::size_t used = 0;
    int level = -1;
    try {
      level = std::stoi(level_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != level_text.size() || level < 0)
      throw DomainError("weights line " + std::to_string(lineno) + ": bad level '" +
                        level_text + "'");
    if (!seen.emplace(level, parse_fraction(weight_text)).second)
      throw DomainError("weights line " + std::to_string(lineno) + ": level " +
                        std::to_string(level) + " repeated");
  }
  if (seen.empty()) throw DomainError("weights file has no entries");
  std::vector<mpq_class> dense(static_cast<std::size_t>(seen.rbegin()->first) + 1, mpq_class(0));
  for (auto& [k, w] : seen) dense[static_cast<std::size_t>(k)] = w;
  return dense;
}

std::vector<mpq_class> read_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open weights file '" + path + "'");
  return read_weights(in);
}

void write_weights(std::ostream& os, const std::vector<mpq_class>& weights) {
  os << "# level\tweight\n";
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (sgn(weights[k]) != 0) os << k << '\t' << to_fraction(weights[k]) << '\n';
}

std::vector<mpq_class> weights_from_snapshot(const PopulationSnapshot& snap) {
  std::vector<mpq_class> w(snap.populations.size(), mpq_class(0));
  mpq_class excited = 0;
  for (std::size_t m = 1; m < w.size(); ++m) {
    w[m] = mpq_class(std::max(snap.populations[m], 0.0));
    excited += w[m];
  }
  if (excited <= 1) {
    w[0] = 1 - excited;
  } else {
    for (auto& x : w) x /= excited;
  }
  return w;
}

}  // namespace dicke::io
