#include "wme/weight_state.hpp"

#include <algorithm>
#include <cmath>

namespace wme {

double to_score(const WeightTable &table, double linear_value)
{
  return table.log_domain() ? std::log(linear_value) : linear_value;
}

double from_score(const WeightTable &table, double score) { return table.log_domain() ? std::exp(score) : score; }

WeightState::WeightState(const WeightTable &table)
  : m_table(&table), m_log(table.log_domain()), m_value(table.num_vars(), kUnassigned)
{
  recompute({});
  m_initial_residual = m_residual;
}

void WeightState::assign(Lit lit)
{
  const Var v = lit.var();
  WME_CONTRACT(m_value[v.index] == kUnassigned, "weight state: variable assigned twice");
  m_value[v.index] = lit.positive() ? 1 : 0;
  ++m_assigned;
  ++m_ops;
  if (m_log) {
    m_partial += m_table->log_weight(lit);
    m_residual -= m_table->log_best(v);
  } else {
    m_partial *= m_table->weight(lit);
    m_residual /= m_table->best(v);
  }
}

void WeightState::unassign(Lit lit)
{
  const Var v = lit.var();
  WME_CONTRACT(m_value[v.index] == (lit.positive() ? 1 : 0), "weight state: unassigning a literal that is not assigned");
  m_value[v.index] = kUnassigned;
  --m_assigned;
  ++m_ops;
  if (m_log) {
    m_partial -= m_table->log_weight(lit);
    m_residual += m_table->log_best(v);
  } else {
    m_partial /= m_table->weight(lit);
    m_residual *= m_table->best(v);
  }
  if (m_assigned == 0) {
    // Back at the empty trail: snap to the exact initial values.
    m_partial = m_log ? 0.0 : 1.0;
    m_residual = m_initial_residual;
  }
}

void WeightState::recompute(std::span<const Lit> assigned)
{
  std::fill(m_value.begin(), m_value.end(), kUnassigned);
  for (Lit l : assigned) {
    WME_CONTRACT(m_value[l.var().index] == kUnassigned, "weight state: variable assigned twice");
    m_value[l.var().index] = l.positive() ? 1 : 0;
  }
  m_assigned = static_cast<uint32_t>(assigned.size());
  m_partial = m_log ? 0.0 : 1.0;
  m_residual = m_log ? 0.0 : 1.0;
  for (Lit l : assigned) {
    if (m_log) m_partial += m_table->log_weight(l);
    else m_partial *= m_table->weight(l);
  }
  for (uint32_t v = 0; v < m_value.size(); ++v) {
    if (m_value[v] != kUnassigned) continue;
    if (m_log) m_residual += m_table->log_best(Var{ v });
    else m_residual *= m_table->best(Var{ v });
  }
  m_ops = 0;
}

double WeightState::partial_weight() const { return m_log ? std::exp(m_partial) : m_partial; }
double WeightState::residual_bound() const { return m_log ? std::exp(m_residual) : m_residual; }
double WeightState::upper_bound() const { return m_log ? std::exp(m_partial + m_residual) : m_partial * m_residual; }

bool WeightState::weight_conflict(double theta) const
{
  WME_CONTRACT(theta > 0.0, "threshold must be positive");
  return weight_conflict(ActiveBound{ to_score(*m_table, theta), Admit::AtLeast });
}

}// namespace wme
