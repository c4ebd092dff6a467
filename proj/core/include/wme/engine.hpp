#ifndef WME_ENGINE_HPP
#define WME_ENGINE_HPP

#include "wme/formula.hpp"
#include "wme/weight_state.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wme {

enum class Backtracking { Chronological, NonChronological };
enum class UipMode { First, Last };
enum class ClauseOrigin : uint8_t { Original, Learned, Blocking, WeightConflict };

struct SolverConfig
{
  Backtracking backtracking = Backtracking::NonChronological;
  bool restarts = true;
  bool weight_pruning = true;
  double activity_decay = 0.95;
  uint32_t restart_base = 256;
  uint64_t seed = 0;

  /// Chronological backtracking relies on implicit blocking, which restarts would break.
  void validate() const;
  /// Defaults for a backtracking style: restarts on for non-chronological, off otherwise.
  static SolverConfig for_style(Backtracking style);
};

using ClauseRef = uint32_t;
inline constexpr ClauseRef kDecisionReason = UINT32_MAX;
/// Reason of a literal flipped after its sibling branch was closed in chronological mode.
/// The implied clause is the negation of the decisions up to and including the flipped one.
inline constexpr ClauseRef kImplicitBlockReason = UINT32_MAX - 1;

struct StoredClause
{
  std::vector<Lit> lits;
  ClauseOrigin origin = ClauseOrigin::Original;
  uint32_t lbd = 0;
  bool deleted = false;
};

struct SolverStats
{
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t conflicts = 0;
  uint64_t weight_conflicts = 0;
  uint64_t weight_set_literals = 0;
  uint64_t restarts = 0;
  uint64_t learned_clauses = 0;
  uint64_t blocking_clauses = 0;
  uint64_t weight_clauses = 0;
  uint64_t deleted_clauses = 0;
  uint64_t peak_clauses = 0;
  uint64_t models = 0;
  uint64_t bound_updates = 0;
  uint64_t residual_backtracks = 0;

  [[nodiscard]] double mean_weight_set_size() const
  {
    return weight_conflicts == 0 ? 0.0 : static_cast<double>(weight_set_literals) / static_cast<double>(weight_conflicts);
  }
};

struct Analysis
{
  /// Learned clause; when `asserting`, lits[0] is the asserting literal and lits[1] sits on
  /// the highest remaining level.
  std::vector<Lit> lits;
  bool asserting = false;
  int conflict_level = 0;
  /// Second-highest level of `lits` (first-UIP backjump target); 0 for unit clauses.
  int assertion_level = 0;
};

/// CDCL core: trail with decision levels, two-watched-literal propagation, conflict analysis,
/// activity-based branching with phase saving, restarts and the clause store. Enumeration logic
/// lives in `Enumerator`; this class only knows clauses and the weight state it keeps in sync.
///
/// In chronological mode implied literals carry their true implication level, which may be lower
/// than the current decision level. Backtracking keeps such literals on the trail.
class Engine
{
public:
  Engine(const Instance &instance, SolverConfig config);

  [[nodiscard]] const SolverConfig &config() const { return m_config; }
  [[nodiscard]] uint32_t num_vars() const { return m_num_vars; }
  [[nodiscard]] const WeightTable &weights() const { return *m_table; }
  [[nodiscard]] const WeightState &weight_state() const { return m_wstate; }
  /// The original formula contained the empty clause or is refuted at level 0.
  [[nodiscard]] bool root_inconsistent() const { return m_root_inconsistent; }

  // --- assignment ---------------------------------------------------------
  /// 1 true, 0 false, -1 unassigned.
  [[nodiscard]] int value(Lit l) const
  {
    const int8_t v = m_value[l.var().index];
    return v < 0 ? -1 : (v == (l.positive() ? 1 : 0) ? 1 : 0);
  }
  [[nodiscard]] bool is_true(Lit l) const { return value(l) == 1; }
  [[nodiscard]] bool is_false(Lit l) const { return value(l) == 0; }
  [[nodiscard]] int level(Var v) const { return m_level[v.index]; }
  [[nodiscard]] ClauseRef reason(Var v) const { return m_reason[v.index]; }
  [[nodiscard]] int decision_level() const { return static_cast<int>(m_trail_lim.size()); }
  [[nodiscard]] std::span<const Lit> trail() const { return m_trail; }
  /// Decision literal that opened `level` (1-based).
  [[nodiscard]] Lit decision_at(int level) const { return m_trail[m_trail_lim[static_cast<size_t>(level) - 1]]; }
  [[nodiscard]] std::vector<Lit> decisions() const;
  [[nodiscard]] bool all_assigned() const { return m_trail.size() == m_num_vars; }
  [[nodiscard]] std::vector<bool> model_values() const;

  // --- clause store -------------------------------------------------------
  [[nodiscard]] const StoredClause &clause(ClauseRef ref) const { return m_clauses[ref]; }
  [[nodiscard]] size_t clause_slots() const { return m_clauses.size(); }
  [[nodiscard]] size_t live_clauses() const { return m_live_clauses; }
  /// Stores a clause without propagating. Watches are placed on the two literals that are
  /// non-false or false at the highest levels.
  ClauseRef add_clause(std::span<const Lit> lits, ClauseOrigin origin);

  // --- search primitives --------------------------------------------------
  /// Unit propagation to fixpoint; returns the conflicting clause, if any.
  std::optional<ClauseRef> propagate();
  /// Branching literal for the next decision, or nullopt when every variable is assigned.
  [[nodiscard]] std::optional<Lit> pick_branch();
  /// Picks a literal, opens a new decision level and assigns it. False when all are assigned.
  bool decide();
  /// Opens a new decision level with the given (unassigned) literal.
  void decide(Lit lit);
  /// Assigns `lit` at the current decision level (or its implication level in chronological
  /// mode when `reason` is a clause).
  void assign(Lit lit, ClauseRef reason);
  /// Pops every literal above `level`; kept out-of-order literals are re-queued for propagation.
  void backtrack_to(int level);
  /// Backtracks to level 0 keeping all clauses (non-chronological mode only).
  void restart();
  [[nodiscard]] bool restart_due() const;

  /// Conflict analysis of a clause falsified at the current decision level.
  [[nodiscard]] Analysis analyze(std::span<const Lit> conflict, UipMode mode);
  /// Full conflict handling: drops to the clause's level, analyzes, learns, backtracks and
  /// asserts. Returns false when the conflict sits at level 0 (search space exhausted).
  bool resolve_conflict(ClauseRef conflict, UipMode mode);
  /// Reason clause literals of an implied literal, materializing implicit-block reasons.
  void reason_literals(Lit implied, std::vector<Lit> &out) const;

  /// Ordered priority: variables with `priority[v]` are branched on before all others.
  void set_branch_priority(const std::vector<bool> &priority);
  /// Number of priority variables still unassigned.
  [[nodiscard]] uint32_t unassigned_priority() const { return m_unassigned_priority; }

  /// Rebuilds the weight state from the trail (linear-mode drift control).
  void refresh_weight_state();
  void note_conflict() { ++m_conflicts_since_restart; }

  /// Debug validator for the watch invariants. Returns false on the first violation.
  [[nodiscard]] bool validate_watches() const;
  /// Every live clause of length >= 2 is neither unit nor falsified under the trail.
  [[nodiscard]] bool at_fixpoint() const;

  SolverStats &stats() { return m_stats; }
  [[nodiscard]] const SolverStats &stats() const { return m_stats; }

private:
  struct Watcher
  {
    ClauseRef cref;
    Lit blocker;
  };

  void attach(ClauseRef ref);
  void unchecked_assign(Lit lit, int level, ClauseRef reason);
  void unassign(Lit lit);
  void bump(Var v);
  void decay_activity() { m_var_inc /= m_config.activity_decay; }
  [[nodiscard]] uint32_t compute_lbd(std::span<const Lit> lits);
  void reduce_learned();
  [[nodiscard]] bool locked(ClauseRef ref) const;
  [[nodiscard]] int max_level(std::span<const Lit> lits) const;

  // Indexed binary max-heap on (priority tier, activity).
  [[nodiscard]] bool heap_less(uint32_t a, uint32_t b) const;
  void heap_insert(uint32_t v);
  uint32_t heap_pop();
  void heap_up(size_t i);
  void heap_down(size_t i);
  [[nodiscard]] bool in_heap(uint32_t v) const { return m_heap_index[v] >= 0; }

  SolverConfig m_config;
  const WeightTable *m_table;
  uint32_t m_num_vars;
  WeightState m_wstate;
  bool m_root_inconsistent = false;

  std::vector<int8_t> m_value;
  std::vector<int> m_level;
  std::vector<ClauseRef> m_reason;
  std::vector<Lit> m_trail;
  std::vector<uint32_t> m_trail_lim;
  size_t m_qhead = 0;

  std::vector<StoredClause> m_clauses;
  std::vector<std::vector<Watcher>> m_watches;
  size_t m_live_clauses = 0;
  size_t m_live_learned = 0;
  size_t m_reduce_budget = 2000;

  std::vector<double> m_activity;
  double m_var_inc = 1.0;
  std::vector<int8_t> m_phase;
  std::vector<uint8_t> m_priority;
  uint32_t m_unassigned_priority = 0;
  std::vector<uint32_t> m_heap;
  std::vector<int> m_heap_index;

  uint64_t m_conflicts_since_restart = 0;
  uint64_t m_restart_index = 0;

  // analysis scratch
  std::vector<uint8_t> m_seen;
  std::vector<Lit> m_reason_buf;
  std::vector<uint32_t> m_level_stamp;
  uint32_t m_stamp = 0;

  SolverStats m_stats;
};

/// Luby sequence 1 1 2 1 1 2 4 ... (0-based index).
uint64_t luby(uint64_t index);

}// namespace wme

#endif
