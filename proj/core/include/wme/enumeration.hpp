#ifndef WME_ENUMERATION_HPP
#define WME_ENUMERATION_HPP

#include "wme/engine.hpp"
#include "wme/weight_conflict.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wme {

enum class Mode { All, Threshold, TopK };

struct EnumerationTask
{
  Mode mode = Mode::All;
  double theta = 0.0;///< threshold mode: keep w >= theta
  uint32_t k = 1;    ///< top-k mode
  SolverConfig config;
  bool priority_optimization = true;
  /// Keep every emitted model in the result. Turn off for very large runs and use the callback.
  bool collect_models = true;
  std::optional<std::chrono::duration<double>> time_limit;
  std::optional<uint64_t> conflict_limit;

  /// Throws ContractViolation on theta <= 0 (threshold) or k == 0 (top-k).
  void validate() const;
};

struct ModelRecord
{
  /// Value of every variable, index = variable.
  std::vector<bool> values;
  double weight = 0.0;
  double log_weight = 0.0;

  [[nodiscard]] std::vector<Lit> literals() const;
};

/// Bounded min-heap of the best models seen so far.
class TopKState
{
public:
  explicit TopKState(uint32_t k, bool log_domain) : m_k(k), m_log(log_domain) {}

  /// Inserts the model if the heap has room or it strictly beats the current minimum.
  bool offer(const ModelRecord &model);
  [[nodiscard]] bool full() const { return m_heap.size() == m_k; }
  [[nodiscard]] size_t size() const { return m_heap.size(); }
  /// The active bound: the k-th best score once full, nothing before.
  [[nodiscard]] std::optional<ActiveBound> bound() const;
  /// Contents, best first.
  [[nodiscard]] std::vector<ModelRecord> sorted() const;

private:
  [[nodiscard]] double score(const ModelRecord &m) const { return m_log ? m.log_weight : m.weight; }

  uint32_t m_k;
  bool m_log;
  std::vector<ModelRecord> m_heap;
};

struct WeightPartition
{
  std::vector<bool> relevant;///< per variable: member of W_r
  uint32_t relevant_count = 0;
  uint32_t irrelevant_count = 0;
  /// Product of w(A) over W_i, kept as a natural log.
  double irrelevant_log_factor = 0.0;

  [[nodiscard]] double irrelevant_factor() const;
};

/// W_i = variables whose two polarity weights are bitwise equal; the rest is W_r.
WeightPartition partition_weight_relevant(const WeightTable &table);

struct ResidualBacktrack
{
  bool terminate = false;
  /// Level whose decision must be flipped; the caller backtracks to flip_level - 1.
  int flip_level = 0;
  size_t popped = 0;
};

/// Pops literals from the top of `trail` (level-0 literals stay) until the remaining bound is
/// no longer excluded by `bound`. `state` must describe the whole trail and is updated in place.
/// When everything above level 0 has been popped without success the result asks to terminate.
ResidualBacktrack residual_aware_backtrack(std::span<const Lit> trail, const std::function<int(Lit)> &level_of,
  WeightState &state, const ActiveBound &bound);

enum class RelevantCheck { NotReady, ExtendAndValidate, WeightConflictTrigger };

/// Decision taken once every weight-relevant variable is assigned, comparing the restricted
/// score w(eta_r) with theta_r = theta / theta_i. `ready` is false unless the top-k heap is
/// full and W_r is complete.
RelevantCheck relevant_complete_check(bool ready, double restricted_score, const ActiveBound &restricted_bound);

/// Optional instrumentation hooks; the defaults do nothing.
class EnumerationObserver
{
public:
  virtual ~EnumerationObserver() = default;
  /// Called at every propagation fixpoint without a Boolean conflict.
  virtual void on_fixpoint(const Engine & /*engine*/) {}
  /// Called for every learned weight-conflict clause together with the bound that produced it.
  virtual void on_weight_clause(std::span<const Lit> /*clause*/, const ActiveBound & /*bound*/) {}
  virtual void on_bound_update(const ActiveBound & /*bound*/) {}
};

struct EnumerationResult
{
  /// Emitted models in discovery order (threshold/all) or final best-first order (top-k).
  std::vector<ModelRecord> models;
  uint64_t emitted = 0;
  bool complete = false;
  SolverStats stats;
  uint64_t relevant_checks = 0;
  double seconds = 0.0;
};

/// Runs one enumeration task to completion or to its limits. `on_model` sees each model as
/// it is accepted: threshold/all emit qualifying models; top-k emits models that enter the heap.
EnumerationResult enumerate(const Instance &instance, const EnumerationTask &task,
  const std::function<void(const ModelRecord &)> &on_model = {}, EnumerationObserver *observer = nullptr);

}// namespace wme

#endif
