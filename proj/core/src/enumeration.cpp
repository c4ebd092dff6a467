#include "wme/enumeration.hpp"

#include <algorithm>
#include <cmath>

namespace wme {

void EnumerationTask::validate() const
{
  if (mode == Mode::Threshold) WME_CONTRACT(theta > 0.0 && std::isfinite(theta), "threshold must be positive and finite");
  if (mode == Mode::TopK) WME_CONTRACT(k >= 1, "top-k needs k >= 1");
  config.validate();
}

std::vector<Lit> ModelRecord::literals() const
{
  std::vector<Lit> out;
  out.reserve(values.size());
  for (uint32_t v = 0; v < values.size(); ++v) out.emplace_back(Var{ v }, values[v]);
  return out;
}

// --- top-k --------------------------------------------------------------------

bool TopKState::offer(const ModelRecord &model)
{
  auto worse_on_top = [this](const ModelRecord &a, const ModelRecord &b) { return score(a) > score(b); };
  if (m_heap.size() < m_k) {
    m_heap.push_back(model);
    std::push_heap(m_heap.begin(), m_heap.end(), worse_on_top);
    return true;
  }
  if (!(score(model) > score(m_heap.front()))) return false;
  std::pop_heap(m_heap.begin(), m_heap.end(), worse_on_top);
  m_heap.back() = model;
  std::push_heap(m_heap.begin(), m_heap.end(), worse_on_top);
  return true;
}

std::optional<ActiveBound> TopKState::bound() const
{
  if (!full()) return std::nullopt;
  return ActiveBound{ score(m_heap.front()), Admit::Above };
}

std::vector<ModelRecord> TopKState::sorted() const
{
  std::vector<ModelRecord> out = m_heap;
  std::sort(out.begin(), out.end(), [this](const ModelRecord &a, const ModelRecord &b) {
    if (score(a) != score(b)) return score(a) > score(b);
    return a.values < b.values;
  });
  return out;
}

// --- partition ----------------------------------------------------------------

double WeightPartition::irrelevant_factor() const { return std::exp(irrelevant_log_factor); }

WeightPartition partition_weight_relevant(const WeightTable &table)
{
  WeightPartition p;
  p.relevant.assign(table.num_vars(), true);
  for (uint32_t v = 0; v < table.num_vars(); ++v) {
    const Var var{ v };
    if (table.polarity_neutral(var)) {
      p.relevant[v] = false;
      ++p.irrelevant_count;
      p.irrelevant_log_factor += table.log_weight(Lit(var, true));
    } else {
      ++p.relevant_count;
    }
  }
  return p;
}

RelevantCheck relevant_complete_check(bool ready, double restricted_score, const ActiveBound &restricted_bound)
{
  if (!ready) return RelevantCheck::NotReady;
  return restricted_bound.excludes(restricted_score) ? RelevantCheck::WeightConflictTrigger
                                                     : RelevantCheck::ExtendAndValidate;
}

// --- residual-aware backtracking ---------------------------------------------

ResidualBacktrack residual_aware_backtrack(std::span<const Lit> trail, const std::function<int(Lit)> &level_of,
  WeightState &state, const ActiveBound &bound)
{
  int top = 0;
  for (Lit l : trail) top = std::max(top, level_of(l));
  std::vector<uint32_t> per_level(static_cast<size_t>(top) + 1, 0);
  for (Lit l : trail) ++per_level[static_cast<size_t>(level_of(l))];

  ResidualBacktrack out;
  for (size_t i = trail.size(); i-- > 0;) {
    const Lit l = trail[i];
    const int lvl = level_of(l);
    if (lvl == 0) continue;
    const int before = top;// highest level of the trail before this pop
    state.unassign(l);
    ++out.popped;
    --per_level[static_cast<size_t>(lvl)];
    while (top > 0 && per_level[static_cast<size_t>(top)] == 0) --top;
    if (!bound.excludes(state.bound_score())) {
      out.flip_level = before;
      return out;
    }
  }
  out.terminate = true;
  return out;
}

// --- driver -------------------------------------------------------------------

namespace {

  constexpr double kTieSlack = 1e-12;

  class Run
  {
  public:
    Run(const Instance &instance, const EnumerationTask &task, const std::function<void(const ModelRecord &)> &on_model,
      EnumerationObserver *observer)
      : m_table(instance.weights), m_task(task), m_engine(instance, task.config),
        m_on_model(on_model), m_observer(observer), m_partition(partition_weight_relevant(instance.weights))
    {
      task.validate();
      if (task.mode == Mode::TopK) m_topk.emplace(task.k, m_table.log_domain());
      if (task.mode == Mode::Threshold) {
        // Weights equal to theta up to rounding must not depend on summation order, so the
        // threshold is lowered by a relative 1e-12 for both pruning and acceptance.
        const double score = to_score(m_table, task.theta);
        const double lowered = m_table.log_domain() ? score - kTieSlack * std::max(1.0, std::abs(score))
                                                    : score * (1.0 - kTieSlack);
        m_threshold = ActiveBound{ lowered, Admit::AtLeast };
      }
      m_priority = task.priority_optimization && m_partition.irrelevant_count > 0 && m_partition.relevant_count > 0;
      m_irrelevant_score = m_table.log_domain() ? m_partition.irrelevant_log_factor : m_partition.irrelevant_factor();
    }

    EnumerationResult run()
    {
      const auto start = std::chrono::steady_clock::now();
      m_result.complete = search(start);
      if (m_topk) m_result.models = m_topk->sorted();
      m_result.stats = m_engine.stats();
      m_result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return std::move(m_result);
    }

  private:
    bool search(std::chrono::steady_clock::time_point start)
    {
      if (m_engine.root_inconsistent()) return true;
      if (m_priority) m_engine.set_branch_priority(m_partition.relevant);
      const bool pruning = m_task.config.weight_pruning;
      uint64_t iterations = 0;
      while (true) {
        if ((++iterations & 0xFFU) == 0 && out_of_budget(start)) return false;

        if (auto conflict = m_engine.propagate()) {
          ++m_engine.stats().conflicts;
          if (!m_engine.resolve_conflict(*conflict, UipMode::First)) return true;
          continue;
        }
        if (m_engine.weight_state().needs_refresh()) m_engine.refresh_weight_state();
        if (m_observer != nullptr) m_observer->on_fixpoint(m_engine);

        if (const auto bound = active_bound(); pruning && bound) {
          bool conflict = m_engine.weight_state().weight_conflict(*bound);
          if (m_priority && m_topk && m_topk->full() && m_engine.unassigned_priority() == 0 && !m_engine.all_assigned()) {
            ++m_result.relevant_checks;
            const RelevantCheck check = relevant_complete_check(true, restricted(m_engine.weight_state().bound_score()),
              ActiveBound{ restricted(bound->score), bound->admit });
            conflict = conflict && check == RelevantCheck::WeightConflictTrigger;
          }
          if (conflict) {
            if (!on_weight_conflict(*bound)) return true;
            continue;
          }
        }

        if (m_engine.restart_due()) {
          m_engine.restart();
          continue;
        }
        if (!m_engine.decide()) {
          if (!on_model()) return true;
        }
      }
    }

    [[nodiscard]] bool out_of_budget(std::chrono::steady_clock::time_point start) const
    {
      if (m_task.time_limit && std::chrono::steady_clock::now() - start >= *m_task.time_limit) return true;
      const auto &s = m_engine.stats();
      return m_task.conflict_limit && s.conflicts + s.weight_conflicts >= *m_task.conflict_limit;
    }

    [[nodiscard]] std::optional<ActiveBound> active_bound() const
    {
      if (m_threshold) return m_threshold;
      if (m_topk) return m_topk->bound();
      return std::nullopt;
    }

    /// Score with the constant W_i factor divided out.
    [[nodiscard]] double restricted(double score) const
    {
      return m_table.log_domain() ? score - m_irrelevant_score : score / m_irrelevant_score;
    }

    bool on_weight_conflict(const ActiveBound &bound)
    {
      std::function<bool(Lit)> skip;
      if (m_priority) skip = [this](Lit l) { return !m_partition.relevant[l.var().index]; };
      const WeightConflictSet set = greedy_conflict_set(m_engine.trail(), m_table, bound, skip);
      auto &stats = m_engine.stats();
      ++stats.weight_conflicts;
      stats.weight_set_literals += set.literals.size();
      int top = 0;
      for (Lit l : set.literals) top = std::max(top, m_engine.level(l.var()));
      // Only root literals (or none at all) are responsible: nothing admissible is left.
      if (top == 0) return false;
      const Clause clause = weight_conflict_clause(set);
      if (m_observer != nullptr) m_observer->on_weight_clause(clause, bound);
      const ClauseRef ref = m_engine.add_clause(clause, ClauseOrigin::WeightConflict);
      return m_engine.resolve_conflict(ref, UipMode::First);
    }

    bool on_model()
    {
      ModelRecord model;
      model.values = m_engine.model_values();
      model.log_weight = model_log_weight(m_table, model.values);
      model.weight = model_weight(m_table, model.values);
      ++m_engine.stats().models;
      const double score = m_table.log_domain() ? model.log_weight : model.weight;

      bool accepted = true;
      bool tightened = false;
      if (m_threshold) accepted = !m_threshold->excludes(score);
      if (m_topk) {
        const auto before = m_topk->bound();
        accepted = m_topk->offer(model);
        const auto after = m_topk->bound();
        if (after && (!before || after->score > before->score)) {
          tightened = true;
          ++m_engine.stats().bound_updates;
          if (m_observer != nullptr) m_observer->on_bound_update(*after);
        }
      }
      if (accepted) {
        ++m_result.emitted;
        if (m_on_model) m_on_model(model);
        if (!m_topk && m_task.collect_models) m_result.models.push_back(std::move(model));
      }

      const int level = m_engine.decision_level();
      if (level == 0) return false;
      if (tightened && m_task.config.weight_pruning) {
        WeightState scratch = m_engine.weight_state();
        const auto r = residual_aware_backtrack(
          m_engine.trail(), [this](Lit l) { return m_engine.level(l.var()); }, scratch, *m_topk->bound());
        ++m_engine.stats().residual_backtracks;
        if (r.terminate) return false;
        flip(r.flip_level, r.flip_level == level ? ClauseOrigin::Blocking : ClauseOrigin::WeightConflict);
        return true;
      }
      flip(level, ClauseOrigin::Blocking);
      return true;
    }

    /// Closes the branch of decision `level` and asserts its negation one level below.
    void flip(int level, ClauseOrigin origin)
    {
      const Lit decision = m_engine.decision_at(level);
      if (m_task.config.backtracking == Backtracking::Chronological) {
        m_engine.backtrack_to(level - 1);
        m_engine.assign(~decision, kImplicitBlockReason);
        return;
      }
      Clause clause;
      clause.reserve(static_cast<size_t>(level));
      for (int i = level; i >= 1; --i) clause.push_back(~m_engine.decision_at(i));
      if (origin == ClauseOrigin::WeightConflict && m_observer != nullptr && m_topk)
        m_observer->on_weight_clause(clause, *m_topk->bound());
      const ClauseRef ref = m_engine.add_clause(clause, origin);
      m_engine.backtrack_to(level - 1);
      m_engine.assign(~decision, ref);
    }

    const WeightTable &m_table;
    const EnumerationTask &m_task;
    Engine m_engine;
    const std::function<void(const ModelRecord &)> &m_on_model;
    EnumerationObserver *m_observer;
    WeightPartition m_partition;
    bool m_priority = false;
    double m_irrelevant_score = 0.0;
    std::optional<TopKState> m_topk;
    std::optional<ActiveBound> m_threshold;
    EnumerationResult m_result;
  };

}// namespace

EnumerationResult enumerate(const Instance &instance, const EnumerationTask &task,
  const std::function<void(const ModelRecord &)> &on_model, EnumerationObserver *observer)
{
  Run run(instance, task, on_model, observer);
  return run.run();
}

}// namespace wme
