#ifndef WME_WEIGHT_STATE_HPP
#define WME_WEIGHT_STATE_HPP

#include "wme/formula.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wme {

/// Which models a bound admits: `AtLeast` keeps w >= theta (threshold enumeration), `Above`
/// keeps w > theta (top-k once the heap is full; ties cannot improve it).
enum class Admit { AtLeast, Above };

/// An active pruning bound. `score` lives in the weight table's domain (log or linear).
struct ActiveBound
{
  double score = 0.0;
  Admit admit = Admit::AtLeast;

  /// True when no model whose optimistic weight is `upper_score` can be admitted.
  [[nodiscard]] bool excludes(double upper_score) const
  {
    return admit == Admit::AtLeast ? upper_score < score : upper_score <= score;
  }
};

/// Converts a linear threshold into the table's score domain.
double to_score(const WeightTable &table, double linear_value);
/// Converts a score back to a linear weight.
double from_score(const WeightTable &table, double score);

/// Incremental pair (w(mu), I_max(mu)) for the solver trail mu.
///
/// w(mu) is the product of the assigned literals' weights; I_max(mu) the product of best(A)
/// over unassigned variables, so w(mu) * I_max(mu) bounds every total extension of mu.
/// In log mode both are kept as log sums and updates are additions; in linear mode they are
/// products and the state asks to be rebuilt every `kRefreshInterval` updates.
class WeightState
{
public:
  static constexpr uint64_t kRefreshInterval = uint64_t{ 1 } << 16U;

  WeightState() = default;
  explicit WeightState(const WeightTable &table);

  void assign(Lit lit);
  void unassign(Lit lit);

  /// Rebuilds both fields from scratch for the given set of assigned literals.
  void recompute(std::span<const Lit> assigned);
  [[nodiscard]] bool needs_refresh() const { return !m_log && m_ops >= kRefreshInterval; }

  [[nodiscard]] double partial_score() const { return m_partial; }
  [[nodiscard]] double residual_score() const { return m_residual; }
  [[nodiscard]] double bound_score() const { return m_log ? m_partial + m_residual : m_partial * m_residual; }

  [[nodiscard]] double partial_weight() const;
  [[nodiscard]] double residual_bound() const;
  /// w(mu) * I_max(mu), linear.
  [[nodiscard]] double upper_bound() const;

  /// The pruning test: true iff the optimistic completion cannot be admitted by `bound`.
  [[nodiscard]] bool weight_conflict(const ActiveBound &bound) const { return bound.excludes(bound_score()); }
  /// Linear-threshold convenience for threshold mode: w(mu) * I_max(mu) < theta.
  [[nodiscard]] bool weight_conflict(double theta) const;

  [[nodiscard]] uint32_t assigned_count() const { return m_assigned; }
  [[nodiscard]] bool is_assigned(Var v) const { return m_value[v.index] != kUnassigned; }
  [[nodiscard]] bool log_domain() const { return m_log; }
  [[nodiscard]] const WeightTable &table() const { return *m_table; }

private:
  static constexpr int8_t kUnassigned = -1;

  const WeightTable *m_table = nullptr;
  bool m_log = true;
  double m_partial = 0.0;
  double m_residual = 0.0;
  double m_initial_residual = 0.0;
  uint32_t m_assigned = 0;
  uint64_t m_ops = 0;
  std::vector<int8_t> m_value;
};

}// namespace wme

#endif
