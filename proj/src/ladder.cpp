#include "dicke/ladder.hpp"

#include <cmath>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

LadderModel::LadderModel(int n, double gamma) : n_(n), gamma_(gamma) {
  if (n < 1) throw DomainError("ladder: N must be >= 1, got " + std::to_string(n));
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("ladder: gamma must be positive and finite");
}

std::int64_t LadderModel::ladder_factor(int m) const {
  if (m < 0 || m > n_)
    throw DomainError("ladder_factor: m=" + std::to_string(m) + " outside [0, " +
                      std::to_string(n_) + "]");
  return static_cast<std::int64_t>(m) * (n_ + 1 - m);
}

int LadderModel::partner(int m) const {
  if (m < 1 || m > n_)
    throw DomainError("partner: m=" + std::to_string(m) + " outside [1, " +
                      std::to_string(n_) + "]");
  return n_ + 1 - m;
}

const PoleEntry* PoleSet::find(std::int64_t value) const {
  for (const auto& e : entries)
    if (e.value == value) return &e;
  return nullptr;
}

PoleSet pole_spectrum(const LadderModel& model, int m_low, int m_high) {
  if (m_low < 1 || m_high > model.n() || m_low > m_high)
    throw DomainError("pole_spectrum: window [" + std::to_string(m_low) + ", " +
                      std::to_string(m_high) + "] invalid for N=" + std::to_string(model.n()));
  PoleSet set;
  for (int k = m_low; k <= m_high; ++k) {
    const int p = model.partner(k);
    if (p < k && p >= m_low) continue;  // already grouped with its partner
    PoleEntry e;
    e.value = model.ladder_factor(k);
    e.indices.push_back(k);
    if (p > k && p <= m_high) e.indices.push_back(p);
    e.multiplicity = static_cast<int>(e.indices.size());
    set.entries.push_back(std::move(e));
  }
  return set;
}

}  // namespace dicke
