#include "dicke/residue_engine.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "dicke/errors.hpp"
#include "prime_factors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dicke {

int parallel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

const AffineCoefficient* SpectralDecomposition::find(std::int64_t pole) const {
  for (const auto& t : terms)
    if (t.pole == pole) return &t.coeff;
  return nullptr;
}

const SpectralDecomposition& CoefficientMatrix::row(int m) const {
  if (m < 1 || m > m0) throw DomainError("CoefficientMatrix::row: m outside [1, m0]");
  return rows[static_cast<std::size_t>(m0 - m)];
}

namespace {

void check_pair(const LadderModel& model, int m0, int m) {
  if (m0 < 1 || m0 > model.n())
    throw DomainError("m0=" + std::to_string(m0) + " outside [1, N]");
  if (m < 1 || m > m0)
    throw DomainError("m=" + std::to_string(m) + " outside [1, m0=" + std::to_string(m0) +
                      "]; states above m0 are never populated");
}

void check_pole_index(int m0, int m, int j) {
  if (j < m || j > m0)
    throw DomainError("pole index j=" + std::to_string(j) + " outside window [" +
                      std::to_string(m) + ", " + std::to_string(m0) + "]");
}

int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

/// h_{m0} ... h_{m+1}
mpz_class ladder_product(const LadderModel& model, int m0, int m) {
  mpz_class p = 1;
  for (int k = m + 1; k <= m0; ++k) p *= model.ladder_factor(k);
  return p;
}

bool partner_in_window(const LadderModel& model, int j, int m, int m0) {
  const int p = model.partner(j);
  return p != j && p >= m && p <= m0;
}

mpq_class make_q(const mpz_class& num, const mpz_class& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace

mpq_class simple_coefficient(const LadderModel& model, int m0, int m, int j) {
  check_pair(model, m0, m);
  check_pole_index(m0, m, j);
  if (partner_in_window(model, j, m, m0))
    throw MultiplicityError("simple_coefficient: pole h_" + std::to_string(j) +
                            " is doubled in the window");
  const std::int64_t h = model.ladder_factor(j);
  mpz_class den = 1;
  for (int k = m; k <= m0; ++k)
    if (k != j) den *= h - model.ladder_factor(k);
  return make_q(parity_sign(m0 - m) * ladder_product(model, m0, m), den);
}

AffineCoefficient degenerate_coefficient(const LadderModel& model, int m0, int m, int j) {
  check_pair(model, m0, m);
  check_pole_index(m0, m, j);
  if (!partner_in_window(model, j, m, m0))
    throw MultiplicityError("degenerate_coefficient: pole h_" + std::to_string(j) +
                            " is simple in the window");
  const int jp = model.partner(j);
  const std::int64_t h = model.ladder_factor(j);
  mpz_class den = 1;
  mpq_class shift = 0;
  for (int k = m; k <= m0; ++k) {
    if (k == j || k == jp) continue;
    const std::int64_t d = h - model.ladder_factor(k);
    den *= d;
    shift += mpq_class(1, d > 0 ? d : -d) * (d > 0 ? 1 : -1);
  }
  const mpq_class prefactor = make_q(parity_sign(m0 - m) * ladder_product(model, m0, m), den);
  AffineCoefficient c;
  c.slope = -prefactor;
  c.intercept = -prefactor * shift;
  return c;
}

AffineCoefficient degenerate_coefficient_limit(const LadderModel& model, int m0, int m, int j) {
  check_pair(model, m0, m);
  check_pole_index(m0, m, j);
  if (m0 != model.n())
    throw DomainError("degenerate_coefficient_limit: only defined for m0 = N");
  if (!partner_in_window(model, j, m, m0))
    throw MultiplicityError("degenerate_coefficient_limit: pole h_" + std::to_string(j) +
                            " is simple in the window");
  const int n = model.n();
  const int lower = std::min(j, model.partner(j));
  const int half = n / 2;
  const std::int64_t h = model.ladder_factor(lower);
  auto h_at = [&](int i) { return mpq_class(model.ladder_factor(i)); };

  // The window [m, N] folds onto [1, N/2]: indices below m appear once (via
  // their partners above N+1-m), indices in [m, N/2] appear twice, and the
  // centre of an odd ladder once.
  mpq_class amplitude = h_at(lower) * h_at(lower) / h_at(m);
  mpq_class shift = 0;
  for (int i = 1; i < m; ++i) {
    const mpq_class gap = h - h_at(i);
    amplitude *= h_at(i) / gap;
    shift += 1 / gap;
  }
  for (int i = m; i <= half; ++i) {
    if (i == lower) continue;
    const mpq_class gap = h - h_at(i);
    const mpq_class r = h_at(i) / gap;
    amplitude *= r * r;
    shift += 2 / gap;
  }
  if (n % 2 == 1) {
    const int centre = (n + 1) / 2;
    const mpq_class gap = h - h_at(centre);
    amplitude *= h_at(centre) / gap;
    shift += 1 / gap;
  }
  amplitude *= parity_sign(n - m + 1);

  AffineCoefficient c;
  c.slope = amplitude;
  c.intercept = amplitude * shift;
  return c;
}

SpectralDecomposition decompose(const LadderModel& model, int m0, int m) {
  check_pair(model, m0, m);
  const PoleSet poles = pole_spectrum(model, m, m0);
  std::vector<std::pair<int, SpectralTerm>> keyed;
  keyed.reserve(poles.entries.size());
  for (const auto& e : poles.entries) {
    SpectralTerm t;
    t.pole = e.value;
    if (e.multiplicity == 1)
      t.coeff.intercept = simple_coefficient(model, m0, m, e.indices.front());
    else
      t.coeff = degenerate_coefficient(model, m0, m, e.indices.front());
    keyed.emplace_back(e.indices.back(), std::move(t));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  SpectralDecomposition d{m0, m, {}};
  d.terms.reserve(keyed.size());
  for (auto& [_, t] : keyed) d.terms.push_back(std::move(t));
  return d;
}

namespace {

struct Column {
  int top = 0;     // largest ladder index carrying the pole
  int other = -1;  // partner index that enters further down, or -1
  std::int64_t pole = 0;
};

/// Coefficients of rows [m_low, emit_top] for every pole of the window
/// [m_low, m0], one column at a time.  Along a column only one new gap
/// (h - h_m) = (top-m)(N+1-top-m) enters per row, so the exact prefactor is
/// updated in O(#primes) and never needs a gcd.
class ColumnKernel {
 public:
  ColumnKernel(const LadderModel& model, int m0, int m_low, int emit_top)
      : model_(model), m0_(m0), m_low_(m_low), emit_top_(emit_top),
        primes_(model.n() + 1) {
    const int n = model.n();
    for (int j = m0; j >= m_low; --j) {
      Column c;
      c.top = j;
      c.pole = model.ladder_factor(j);
      if (j >= 1) {
        const int p = n + 1 - j;
        if (p > j && p <= m0) continue;  // owned by the column at p
        if (p < j) c.other = p;
      }
      columns_.push_back(c);
    }
    // numerators h_{m0} ... h_{m+1} as exponent vectors
    numerators_.assign(static_cast<std::size_t>(m0 - m_low + 1),
                       std::vector<int>(primes_.size(), 0));
    for (int m = m0 - 1; m >= m_low; --m) {
      auto& e = numerators_[static_cast<std::size_t>(m - m_low)];
      e = numerators_[static_cast<std::size_t>(m + 1 - m_low)];
      primes_.accumulate(e, m + 1, 1);
      primes_.accumulate(e, n - m, 1);
    }
  }

  const std::vector<Column>& columns() const { return columns_; }

  /// Entries for rows min(top, emit_top) .. m_low, highest row first.
  std::vector<AffineCoefficient> run(const Column& col) const {
    const int n = model_.n();
    const int j = col.top;
    std::vector<int> gap_exps(primes_.size(), 0);
    int gap_sign = 1;
    mpq_class shift = 0;
    const bool track_shift = col.other >= m_low_;

    auto absorb = [&](int k) {
      const std::int64_t a = j - k;
      const std::int64_t b = n + 1 - j - k;
      primes_.accumulate(gap_exps, a, 1);
      primes_.accumulate(gap_exps, b, 1);
      if ((a < 0) != (b < 0)) gap_sign = -gap_sign;
      if (track_shift) {
        const std::int64_t d = a * b;
        shift += mpq_class(1, d > 0 ? d : -d) * (d > 0 ? 1 : -1);
      }
    };

    for (int k = j + 1; k <= m0_; ++k) absorb(k);

    std::vector<AffineCoefficient> out;
    out.reserve(static_cast<std::size_t>(std::max(0, std::min(j, emit_top_) - m_low_ + 1)));
    std::vector<int> exps(primes_.size());
    bool doubled = false;
    for (int m = j; m >= m_low_; --m) {
      if (m < j) {
        if (m == col.other)
          doubled = true;
        else
          absorb(m);
      }
      if (m > emit_top_) continue;
      const auto& num = numerators_[static_cast<std::size_t>(m - m_low_)];
      for (std::size_t i = 0; i < exps.size(); ++i) exps[i] = num[i] - gap_exps[i];
      mpq_class value = primes_.materialize(exps);
      if (gap_sign * parity_sign(m0_ - m) < 0) value = -value;
      AffineCoefficient c;
      if (!doubled) {
        c.intercept = std::move(value);
      } else {
        c.slope = -value;
        c.intercept = c.slope * shift;
      }
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  const LadderModel& model_;
  int m0_, m_low_, emit_top_;
  detail::PrimeTable primes_;
  std::vector<Column> columns_;
  std::vector<std::vector<int>> numerators_;
};

std::vector<std::vector<AffineCoefficient>> run_columns(const ColumnKernel& kernel,
                                                        Execution exec) {
  const auto& cols = kernel.columns();
  std::vector<std::vector<AffineCoefficient>> out(cols.size());
  const long count = static_cast<long>(cols.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < count; ++c) out[c] = kernel.run(cols[c]);
  } else {
    for (long c = 0; c < count; ++c) out[c] = kernel.run(cols[c]);
  }
  return out;
}

}  // namespace

CoefficientMatrix coefficient_matrix(const LadderModel& model, int m0, Execution exec) {
  if (m0 < 1 || m0 > model.n())
    throw DomainError("coefficient_matrix: m0=" + std::to_string(m0) + " outside [1, N]");
  const ColumnKernel kernel(model, m0, 1, m0);
  auto entries = run_columns(kernel, exec);

  CoefficientMatrix mat;
  mat.n = model.n();
  mat.m0 = m0;
  for (const auto& c : kernel.columns()) mat.poles.push_back(c.pole);
  mat.rows.resize(static_cast<std::size_t>(m0));
  for (int m = m0; m >= 1; --m) {
    auto& row = mat.rows[static_cast<std::size_t>(m0 - m)];
    row.m0 = m0;
    row.m = m;
  }
  const auto& cols = kernel.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    // entries[c][i] belongs to row m = top - i
    for (std::size_t i = 0; i < entries[c].size(); ++i) {
      const int m = cols[c].top - static_cast<int>(i);
      mat.rows[static_cast<std::size_t>(m0 - m)].terms.push_back(
          SpectralTerm{cols[c].pole, std::move(entries[c][i])});
    }
  }
  return mat;
}

SpectralDecomposition ground_decomposition(const LadderModel& model, int m0, Execution exec) {
  if (m0 < 1 || m0 > model.n())
    throw DomainError("ground_decomposition: m0=" + std::to_string(m0) + " outside [1, N]");
  const ColumnKernel kernel(model, m0, 0, 0);
  auto entries = run_columns(kernel, exec);
  SpectralDecomposition d{m0, 0, {}};
  const auto& cols = kernel.columns();
  for (std::size_t c = 0; c < cols.size(); ++c)
    d.terms.push_back(SpectralTerm{cols[c].pole, std::move(entries[c].front())});
  return d;
}

std::string to_fraction(const mpq_class& q) {
  mpq_class c(q);
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

mpq_class parse_fraction(const std::string& text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  const std::string s = text.substr(b, e - b);

  auto digits = [](const std::string& part, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && i < part.size() && (part[i] == '-' || part[i] == '+')) ++i;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
    return true;
  };
  const auto slash = s.find('/');
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!digits(num, true) || !digits(den, false))
    throw DomainError("malformed rational '" + text + "'");
  mpz_class p(num[0] == '+' ? num.substr(1) : num, 10);
  mpz_class q(den, 10);
  if (q == 0) throw DomainError("zero denominator in '" + text + "'");
  return make_q(p, q);
}

}  // namespace dicke
