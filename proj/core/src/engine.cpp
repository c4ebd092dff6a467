#include "wme/engine.hpp"

#include <algorithm>
#include <random>

namespace wme {

void SolverConfig::validate() const
{
  WME_CONTRACT(!(backtracking == Backtracking::Chronological && restarts),
    "chronological backtracking requires restarts to be disabled");
  WME_CONTRACT(activity_decay > 0.0 && activity_decay < 1.0, "activity decay must lie in (0, 1)");
  WME_CONTRACT(restart_base > 0, "restart base must be positive");
}

SolverConfig SolverConfig::for_style(Backtracking style)
{
  SolverConfig c;
  c.backtracking = style;
  c.restarts = style == Backtracking::NonChronological;
  return c;
}

uint64_t luby(uint64_t index)
{
  // Find the finite subsequence containing `index` and its position within it.
  uint64_t size = 1;
  uint64_t seq = 0;
  while (size < index + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  uint64_t x = index;
  while (size - 1 != x) {
    size = (size - 1) >> 1U;
    --seq;
    x = x % size;
  }
  return uint64_t{ 1 } << seq;
}

Engine::Engine(const Instance &instance, SolverConfig config)
  : m_config(config), m_table(&instance.weights), m_num_vars(instance.formula.num_vars), m_wstate(instance.weights),
    m_value(m_num_vars, -1), m_level(m_num_vars, 0), m_reason(m_num_vars, kDecisionReason),
    m_watches(2 * size_t{ m_num_vars }), m_activity(m_num_vars, 0.0), m_phase(m_num_vars, 1),
    m_priority(m_num_vars, 0), m_heap_index(m_num_vars, -1), m_seen(m_num_vars, 0), m_level_stamp(m_num_vars + 1, 0)
{
  m_config.validate();
  WME_CONTRACT(instance.weights.num_vars() == m_num_vars, "weight table and formula disagree on variable count");

  // Small seeded perturbation so equal-activity variables are ordered by the seed.
  std::mt19937_64 rng(m_config.seed);
  std::uniform_real_distribution<double> jitter(0.0, 1e-6);
  for (uint32_t v = 0; v < m_num_vars; ++v) {
    const Var var{ v };
    m_phase[v] = m_table->weight(Lit(var, true)) >= m_table->weight(Lit(var, false)) ? 1 : 0;
    m_activity[v] = jitter(rng);
  }
  for (uint32_t v = 0; v < m_num_vars; ++v) heap_insert(v);

  std::vector<Lit> units;
  for (const auto &c : instance.formula.clauses) {
    if (c.empty()) {
      m_root_inconsistent = true;
      continue;
    }
    if (c.size() == 1) {
      units.push_back(c.front());
      // Keep the unit as a stored clause so it can serve as a reason.
      m_clauses.push_back(StoredClause{ c, ClauseOrigin::Original, 0, false });
      ++m_live_clauses;
      continue;
    }
    add_clause(c, ClauseOrigin::Original);
  }
  // Unit clauses sit in the store in the order they were read; look their refs up again.
  ClauseRef ref = 0;
  for (const auto &stored : m_clauses) {
    if (stored.lits.size() == 1) {
      const Lit u = stored.lits.front();
      if (is_false(u)) m_root_inconsistent = true;
      else if (value(u) < 0) unchecked_assign(u, 0, ref);
    }
    ++ref;
  }
  m_stats.peak_clauses = m_live_clauses;
  if (!m_root_inconsistent && propagate().has_value()) m_root_inconsistent = true;
}

std::vector<Lit> Engine::decisions() const
{
  std::vector<Lit> out;
  out.reserve(m_trail_lim.size());
  for (uint32_t pos : m_trail_lim) out.push_back(m_trail[pos]);
  return out;
}

std::vector<bool> Engine::model_values() const
{
  WME_CONTRACT(all_assigned(), "model requested from a partial assignment");
  std::vector<bool> values(m_num_vars);
  for (uint32_t v = 0; v < m_num_vars; ++v) values[v] = m_value[v] == 1;
  return values;
}

int Engine::max_level(std::span<const Lit> lits) const
{
  int m = 0;
  for (Lit l : lits) m = std::max(m, level(l.var()));
  return m;
}

ClauseRef Engine::add_clause(std::span<const Lit> lits, ClauseOrigin origin)
{
  WME_CONTRACT(!lits.empty(), "cannot store the empty clause");
  const auto ref = static_cast<ClauseRef>(m_clauses.size());
  StoredClause c{ { lits.begin(), lits.end() }, origin, 0, false };
  if (origin != ClauseOrigin::Original) c.lbd = compute_lbd(c.lits);
  m_clauses.push_back(std::move(c));
  ++m_live_clauses;
  switch (origin) {
  case ClauseOrigin::Learned:
    ++m_stats.learned_clauses;
    ++m_live_learned;
    break;
  case ClauseOrigin::Blocking: ++m_stats.blocking_clauses; break;
  case ClauseOrigin::WeightConflict: ++m_stats.weight_clauses; break;
  case ClauseOrigin::Original: break;
  }
  m_stats.peak_clauses = std::max<uint64_t>(m_stats.peak_clauses, m_live_clauses);
  if (m_clauses[ref].lits.size() >= 2) attach(ref);
  return ref;
}

void Engine::attach(ClauseRef ref)
{
  auto &lits = m_clauses[ref].lits;
  // Watch the two literals that are non-false, or false on the highest levels.
  auto rank = [&](Lit l) -> long { return is_false(l) ? level(l.var()) : static_cast<long>(m_num_vars) + 2 + value(l); };
  for (size_t slot = 0; slot < 2; ++slot) {
    size_t best = slot;
    for (size_t i = slot + 1; i < lits.size(); ++i)
      if (rank(lits[i]) > rank(lits[best])) best = i;
    std::swap(lits[slot], lits[best]);
  }
  m_watches[lits[0].code()].push_back(Watcher{ ref, lits[1] });
  m_watches[lits[1].code()].push_back(Watcher{ ref, lits[0] });
}

void Engine::unchecked_assign(Lit lit, int lvl, ClauseRef reason)
{
  const uint32_t v = lit.var().index;
  m_value[v] = lit.positive() ? 1 : 0;
  m_level[v] = lvl;
  m_reason[v] = reason;
  m_trail.push_back(lit);
  m_wstate.assign(lit);
  if (m_priority[v] != 0) --m_unassigned_priority;
}

void Engine::assign(Lit lit, ClauseRef reason)
{
  WME_CONTRACT(value(lit) < 0, "assigning an already assigned variable");
  int lvl = decision_level();
  if (m_config.backtracking == Backtracking::Chronological && reason != kDecisionReason
      && reason != kImplicitBlockReason) {
    lvl = 0;
    for (Lit q : m_clauses[reason].lits)
      if (q != lit) lvl = std::max(lvl, level(q.var()));
  }
  unchecked_assign(lit, lvl, reason);
}

void Engine::unassign(Lit lit)
{
  const uint32_t v = lit.var().index;
  m_phase[v] = m_value[v];
  m_value[v] = -1;
  m_reason[v] = kDecisionReason;
  m_wstate.unassign(lit);
  if (m_priority[v] != 0) ++m_unassigned_priority;
  if (!in_heap(v)) heap_insert(v);
}

std::optional<ClauseRef> Engine::propagate()
{
  const bool chrono = m_config.backtracking == Backtracking::Chronological;
  while (m_qhead < m_trail.size()) {
    const Lit p = m_trail[m_qhead++];
    const Lit false_lit = ~p;
    auto &ws = m_watches[false_lit.code()];
    ++m_stats.propagations;
    size_t i = 0;
    size_t j = 0;
    const size_t n = ws.size();
    while (i < n) {
      const Watcher w = ws[i];
      if (is_true(w.blocker)) {
        ws[j++] = ws[i++];
        continue;
      }
      auto &lits = m_clauses[w.cref].lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      ++i;
      const Lit first = lits[0];
      const Watcher kept{ w.cref, first };
      if (first != w.blocker && is_true(first)) {
        ws[j++] = kept;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < lits.size(); ++k) {
        if (!is_false(lits[k])) {
          lits[1] = lits[k];
          lits[k] = false_lit;
          m_watches[lits[1].code()].push_back(Watcher{ w.cref, first });
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = kept;
      if (is_false(first)) {
        while (i < n) ws[j++] = ws[i++];
        ws.resize(j);
        return w.cref;
      }
      int lvl = decision_level();
      if (chrono) {
        lvl = 0;
        for (size_t k = 1; k < lits.size(); ++k) lvl = std::max(lvl, level(lits[k].var()));
      }
      unchecked_assign(first, lvl, w.cref);
    }
    ws.resize(j);
  }
  return std::nullopt;
}

std::optional<Lit> Engine::pick_branch()
{
  while (!m_heap.empty()) {
    const uint32_t v = m_heap.front();
    if (m_value[v] < 0) return Lit(Var{ v }, m_phase[v] != 0);
    heap_pop();
  }
  return std::nullopt;
}

bool Engine::decide()
{
  auto lit = pick_branch();
  if (!lit) return false;
  decide(*lit);
  return true;
}

void Engine::decide(Lit lit)
{
  WME_CONTRACT(value(lit) < 0, "decision on an assigned variable");
  m_trail_lim.push_back(static_cast<uint32_t>(m_trail.size()));
  unchecked_assign(lit, decision_level(), kDecisionReason);
  ++m_stats.decisions;
}

void Engine::backtrack_to(int lvl)
{
  WME_CONTRACT(lvl >= 0, "negative backtrack level");
  if (lvl >= decision_level()) return;
  const size_t start = m_trail_lim[static_cast<size_t>(lvl)];
  size_t keep = start;
  for (size_t i = start; i < m_trail.size(); ++i) {
    const Lit l = m_trail[i];
    if (level(l.var()) > lvl) unassign(l);
    else m_trail[keep++] = l;
  }
  m_trail.resize(keep);
  m_trail_lim.resize(static_cast<size_t>(lvl));
  m_qhead = std::min(m_qhead, start);
  if (m_qhead > m_trail.size()) m_qhead = m_trail.size();
}

void Engine::restart()
{
  WME_CONTRACT(m_config.restarts && m_config.backtracking == Backtracking::NonChronological,
    "restart requires non-chronological backtracking with restarts enabled");
  backtrack_to(0);
  ++m_stats.restarts;
  m_conflicts_since_restart = 0;
  ++m_restart_index;
}

bool Engine::restart_due() const
{
  if (!m_config.restarts || m_config.backtracking != Backtracking::NonChronological) return false;
  return m_conflicts_since_restart >= luby(m_restart_index) * m_config.restart_base;
}

void Engine::reason_literals(Lit implied, std::vector<Lit> &out) const
{
  out.clear();
  const ClauseRef r = reason(implied.var());
  WME_CONTRACT(r != kDecisionReason, "decisions have no reason clause");
  if (r == kImplicitBlockReason) {
    out.push_back(implied);
    const int lvl = level(implied.var());
    for (int i = 1; i <= lvl; ++i) out.push_back(~decision_at(i));
    return;
  }
  const auto &lits = m_clauses[r].lits;
  out.assign(lits.begin(), lits.end());
}

Analysis Engine::analyze(std::span<const Lit> conflict, UipMode mode)
{
  const int L = decision_level();
  WME_CONTRACT(L > 0, "conflict analysis at level 0");
  WME_CONTRACT(max_level(conflict) == L, "conflict clause must be falsified at the current level");

  Analysis out;
  out.lits.emplace_back();// slot for the asserting literal
  int path = 0;
  auto take = [&](Lit q) {
    const uint32_t v = q.var().index;
    if (m_seen[v] != 0 || m_level[v] == 0) return;
    m_seen[v] = 1;
    bump(q.var());
    if (m_level[v] == L) ++path;
    else out.lits.push_back(q);
  };
  for (Lit q : conflict) take(q);

  size_t idx = m_trail.size();
  std::optional<Lit> uip;
  while (path > 0) {
    do {
      --idx;
    } while (!(m_seen[m_trail[idx].var().index] != 0 && m_level[m_trail[idx].var().index] == L));
    const Lit p = m_trail[idx];
    m_seen[p.var().index] = 0;
    --path;
    if ((mode == UipMode::First && path == 0) || reason(p.var()) == kDecisionReason) {
      uip = p;
      break;
    }
    reason_literals(p, m_reason_buf);
    for (Lit q : m_reason_buf)
      if (q != p) take(q);
  }
  for (size_t i = 1; i < out.lits.size(); ++i) m_seen[out.lits[i].var().index] = 0;
  decay_activity();

  if (uip) {
    out.lits[0] = ~*uip;
    out.asserting = true;
    out.conflict_level = L;
    size_t best = 1;
    for (size_t i = 2; i < out.lits.size(); ++i)
      if (level(out.lits[i].var()) > level(out.lits[best].var())) best = i;
    if (out.lits.size() > 1) {
      std::swap(out.lits[1], out.lits[best]);
      out.assertion_level = level(out.lits[1].var());
    }
  } else {
    // Every current-level literal resolved away: the clause is falsified at a lower level.
    out.lits.erase(out.lits.begin());
    out.conflict_level = max_level(out.lits);
    out.assertion_level = out.conflict_level;
  }
  return out;
}

bool Engine::resolve_conflict(ClauseRef conflict, UipMode mode)
{
  const bool chrono = m_config.backtracking == Backtracking::Chronological;
  std::vector<Lit> lits = m_clauses[conflict].lits;
  ClauseRef source = conflict;// kDecisionReason once the clause is no longer stored
  note_conflict();

  while (true) {
    const int L = max_level(lits);
    if (L == 0) return false;
    if (L < decision_level()) backtrack_to(L);

    // A clause with a single literal on its top level already asserts that literal. In
    // chronological mode this shortcut only applies when that literal negates the decision.
    const auto on_top = std::count_if(lits.begin(), lits.end(), [&](Lit q) { return level(q.var()) == L; });
    if (source != kDecisionReason && on_top == 1) {
      const auto top = std::find_if(lits.begin(), lits.end(), [&](Lit q) { return level(q.var()) == L; });
      if (!chrono || *top == ~decision_at(L)) {
        int second = 0;
        for (Lit q : lits)
          if (q != *top) second = std::max(second, level(q.var()));
        const Lit asserted = *top;
        backtrack_to(chrono ? L - 1 : second);
        const ClauseRef ref = source;
        if (m_clauses[ref].lits.size() >= 2) {
          // Re-place the watches so they match the post-backtrack assignment.
          for (Lit w : { m_clauses[ref].lits[0], m_clauses[ref].lits[1] }) {
            auto &ws = m_watches[w.code()];
            ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watcher &x) { return x.cref == ref; }), ws.end());
          }
          attach(ref);
        }
        assign(asserted, ref);
        return true;
      }
    }

    Analysis a = analyze(lits, chrono ? UipMode::Last : mode);
    if (!a.asserting) {
      if (a.lits.empty()) return false;
      lits = std::move(a.lits);
      source = kDecisionReason;
      continue;
    }
    backtrack_to(chrono ? L - 1 : a.assertion_level);
    const Lit asserted = a.lits[0];
    ClauseRef ref = 0;
    if (a.lits.size() == 1) {
      ref = static_cast<ClauseRef>(m_clauses.size());
      m_clauses.push_back(StoredClause{ a.lits, ClauseOrigin::Learned, 1, false });
      ++m_live_clauses;
      ++m_stats.learned_clauses;
    } else {
      ref = add_clause(a.lits, ClauseOrigin::Learned);
    }
    assign(asserted, ref);
    if (m_live_learned > m_reduce_budget) reduce_learned();
    return true;
  }
}

uint32_t Engine::compute_lbd(std::span<const Lit> lits)
{
  ++m_stamp;
  uint32_t n = 0;
  for (Lit l : lits) {
    const auto lvl = static_cast<size_t>(level(l.var()));
    if (lvl < m_level_stamp.size() && m_level_stamp[lvl] != m_stamp) {
      m_level_stamp[lvl] = m_stamp;
      ++n;
    }
  }
  return n;
}

bool Engine::locked(ClauseRef ref) const
{
  const auto &c = m_clauses[ref];
  if (c.lits.empty()) return false;
  const Lit l = c.lits[0];
  return is_true(l) && reason(l.var()) == ref;
}

void Engine::reduce_learned()
{
  std::vector<ClauseRef> candidates;
  for (ClauseRef r = 0; r < m_clauses.size(); ++r) {
    const auto &c = m_clauses[r];
    if (c.deleted || c.origin != ClauseOrigin::Learned || c.lits.size() < 3 || c.lbd <= 2 || locked(r)) continue;
    candidates.push_back(r);
  }
  // Highest LBD first; among equals the older clause goes first.
  std::stable_sort(candidates.begin(), candidates.end(),
    [&](ClauseRef a, ClauseRef b) { return m_clauses[a].lbd > m_clauses[b].lbd; });
  const size_t drop = std::min(candidates.size(), m_live_learned / 2);
  for (size_t i = 0; i < drop; ++i) {
    auto &c = m_clauses[candidates[i]];
    c.deleted = true;
    c.lits.clear();
    c.lits.shrink_to_fit();
    --m_live_clauses;
    --m_live_learned;
    ++m_stats.deleted_clauses;
  }
  for (auto &ws : m_watches) ws.clear();
  for (ClauseRef r = 0; r < m_clauses.size(); ++r) {
    const auto &c = m_clauses[r];
    if (c.deleted || c.lits.size() < 2) continue;
    m_watches[c.lits[0].code()].push_back(Watcher{ r, c.lits[1] });
    m_watches[c.lits[1].code()].push_back(Watcher{ r, c.lits[0] });
  }
  m_reduce_budget *= 2;
}

void Engine::set_branch_priority(const std::vector<bool> &priority)
{
  WME_CONTRACT(priority.size() == m_num_vars, "priority vector size mismatch");
  m_unassigned_priority = 0;
  for (uint32_t v = 0; v < m_num_vars; ++v) {
    m_priority[v] = priority[v] ? 1 : 0;
    if (priority[v] && m_value[v] < 0) ++m_unassigned_priority;
  }
  m_heap.clear();
  std::fill(m_heap_index.begin(), m_heap_index.end(), -1);
  for (uint32_t v = 0; v < m_num_vars; ++v)
    if (m_value[v] < 0) heap_insert(v);
}

void Engine::refresh_weight_state() { m_wstate.recompute(m_trail); }

bool Engine::validate_watches() const
{
  std::vector<uint32_t> count(m_clauses.size(), 0);
  for (uint32_t code = 0; code < m_watches.size(); ++code) {
    for (const auto &w : m_watches[code]) {
      const auto &c = m_clauses[w.cref];
      if (c.deleted || c.lits.size() < 2) return false;
      if (c.lits[0].code() != code && c.lits[1].code() != code) return false;
      ++count[w.cref];
    }
  }
  const bool quiescent = m_qhead == m_trail.size();
  for (ClauseRef r = 0; r < m_clauses.size(); ++r) {
    const auto &c = m_clauses[r];
    if (c.deleted || c.lits.size() < 2) continue;
    if (count[r] != 2) return false;
    if (quiescent) {
      if (is_false(c.lits[0]) && !is_true(c.lits[1])) return false;
      if (is_false(c.lits[1]) && !is_true(c.lits[0])) return false;
    }
  }
  return true;
}

bool Engine::at_fixpoint() const
{
  for (const auto &c : m_clauses) {
    if (c.deleted) continue;
    size_t unassigned = 0;
    bool sat = false;
    for (Lit l : c.lits) {
      if (is_true(l)) sat = true;
      else if (value(l) < 0) ++unassigned;
    }
    if (!sat && unassigned <= 1) return false;
  }
  return true;
}

// --- activity heap -------------------------------------------------------------

void Engine::bump(Var v)
{
  const uint32_t i = v.index;
  m_activity[i] += m_var_inc;
  if (m_activity[i] > 1e100) {
    for (auto &a : m_activity) a *= 1e-100;
    m_var_inc *= 1e-100;
  }
  if (in_heap(i)) heap_up(static_cast<size_t>(m_heap_index[i]));
}

bool Engine::heap_less(uint32_t a, uint32_t b) const
{
  if (m_priority[a] != m_priority[b]) return m_priority[a] < m_priority[b];
  return m_activity[a] < m_activity[b];
}

void Engine::heap_insert(uint32_t v)
{
  m_heap_index[v] = static_cast<int>(m_heap.size());
  m_heap.push_back(v);
  heap_up(m_heap.size() - 1);
}

uint32_t Engine::heap_pop()
{
  const uint32_t top = m_heap.front();
  m_heap_index[top] = -1;
  const uint32_t last = m_heap.back();
  m_heap.pop_back();
  if (!m_heap.empty()) {
    m_heap[0] = last;
    m_heap_index[last] = 0;
    heap_down(0);
  }
  return top;
}

void Engine::heap_up(size_t i)
{
  const uint32_t v = m_heap[i];
  while (i > 0) {
    const size_t parent = (i - 1) / 2;
    if (!heap_less(m_heap[parent], v)) break;
    m_heap[i] = m_heap[parent];
    m_heap_index[m_heap[i]] = static_cast<int>(i);
    i = parent;
  }
  m_heap[i] = v;
  m_heap_index[v] = static_cast<int>(i);
}

void Engine::heap_down(size_t i)
{
  const uint32_t v = m_heap[i];
  const size_t n = m_heap.size();
  while (true) {
    size_t child = 2 * i + 1;
    if (child >= n) break;
    if (child + 1 < n && heap_less(m_heap[child], m_heap[child + 1])) ++child;
    if (!heap_less(v, m_heap[child])) break;
    m_heap[i] = m_heap[child];
    m_heap_index[m_heap[i]] = static_cast<int>(i);
    i = child;
  }
  m_heap[i] = v;
  m_heap_index[v] = static_cast<int>(i);
}

}// namespace wme
