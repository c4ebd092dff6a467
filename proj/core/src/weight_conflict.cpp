#include "wme/weight_conflict.hpp"

#include <algorithm>
#include <cmath>

namespace wme {

WeightConflictSet greedy_conflict_set(std::span<const Lit> trail, const WeightTable &table, const ActiveBound &bound,
  const std::function<bool(Lit)> &skip)
{
  std::vector<Lit> order;
  order.reserve(trail.size());
  for (Lit l : trail)
    if (!skip || !skip(l)) order.push_back(l);
  std::stable_sort(order.begin(), order.end(), [&](Lit a, Lit b) { return table.weight(a) < table.weight(b); });

  const bool log = table.log_domain();
  // Start from the empty set: partial = 1, residual = product of every best(A).
  double partial = log ? 0.0 : 1.0;
  double residual = log ? 0.0 : 1.0;
  for (uint32_t v = 0; v < table.num_vars(); ++v) {
    if (log) residual += table.log_best(Var{ v });
    else residual *= table.best(Var{ v });
  }

  WeightConflictSet out;
  for (size_t i = 0; i < order.size(); ++i) {
    const Lit l = order[i];
    if (log) {
      partial += table.log_weight(l);
      residual -= table.log_best(l.var());
    } else {
      partial *= table.weight(l);
      residual /= table.best(l.var());
    }
    const double score = log ? partial + residual : partial * residual;
    if (bound.excludes(score)) {
      out.literals.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      out.bound_score = score;
      out.whole_trail = i + 1 == order.size();
      return out;
    }
  }
  // Incremental rounding can leave the full product a hair above the bound even though the
  // caller's state says it is excluded. Accept that, but nothing larger.
  const double score = log ? partial + residual : partial * residual;
  const double slack = log ? 1e-9 : 1e-9 * std::abs(bound.score);
  WME_CONTRACT(score <= bound.score + slack, "greedy conflict set requested without an active weight conflict");
  out.literals = std::move(order);
  out.bound_score = score;
  out.whole_trail = true;
  return out;
}

Clause weight_conflict_clause(const WeightConflictSet &set)
{
  Clause c;
  c.reserve(set.literals.size());
  for (Lit l : set.literals) c.push_back(~l);
  return c;
}

}// namespace wme
