#ifndef WME_WEIGHT_CONFLICT_HPP
#define WME_WEIGHT_CONFLICT_HPP

#include "wme/formula.hpp"
#include "wme/weight_state.hpp"

#include <functional>
#include <span>
#include <vector>

namespace wme {

/// Subset S of the trail whose presence alone rules out every admissible completion.
struct WeightConflictSet
{
  std::vector<Lit> literals;
  /// w(S) * I_max(S) as a score, where I_max(S) ranges over variables outside S.
  double bound_score = 0.0;
  /// No strict prefix sufficed and S is the whole (filtered) trail.
  bool whole_trail = false;
};

/// Shortest prefix of the trail, ordered by ascending literal weight (ties in trail order),
/// whose optimistic bound is excluded by `bound`. Literals for which `skip` returns true are
/// left out of the ordering. Throws ContractViolation if the filtered trail itself is not
/// excluded (up to a small rounding slack).
WeightConflictSet greedy_conflict_set(std::span<const Lit> trail, const WeightTable &table, const ActiveBound &bound,
  const std::function<bool(Lit)> &skip = {});

/// C_w: the disjunction of the negated members of S.
Clause weight_conflict_clause(const WeightConflictSet &set);

}// namespace wme

#endif
