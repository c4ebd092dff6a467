#include "wme/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace wme::bench {

Instance generate_instance(const GeneratorSpec &spec, bool log_domain)
{
  WME_CONTRACT(spec.num_vars >= 3, "generator needs at least three variables");
  WME_CONTRACT(spec.clause_ratio >= 0.0, "clause ratio must be non-negative");
  std::mt19937_64 rng(spec.seed);
  Instance inst;
  inst.formula.num_vars = spec.num_vars;
  inst.weights = WeightTable(spec.num_vars, log_domain);

  const auto clauses = static_cast<size_t>(std::llround(spec.clause_ratio * spec.num_vars));
  std::uniform_int_distribution<uint32_t> pick(0, spec.num_vars - 1);
  std::bernoulli_distribution sign(0.5);
  inst.formula.clauses.reserve(clauses);
  for (size_t i = 0; i < clauses; ++i) {
    Clause c;
    while (c.size() < 3) {
      const uint32_t v = pick(rng);
      if (std::any_of(c.begin(), c.end(), [&](Lit l) { return l.var().index == v; })) continue;
      c.emplace_back(Var{ v }, sign(rng));
    }
    inst.formula.clauses.push_back(std::move(c));
  }

  std::uniform_real_distribution<double> unit(kUniformEpsilon, 1.0 - kUniformEpsilon);
  for (uint32_t v = 0; v < spec.num_vars; ++v) {
    for (bool positive : { true, false }) {
      double w = 1.0;
      switch (spec.weights.kind) {
      case Distribution::UniformOpen01: w = unit(rng); break;
      case Distribution::Fixed: w = spec.weights.value; break;
      case Distribution::TwoPoint: w = positive ? spec.weights.value : 1.0 - spec.weights.value; break;
      }
      inst.weights.set(Lit(Var{ v }, positive), w, format_weight(w));
    }
  }
  return inst;
}

std::vector<RunRecord> run_sweep(const std::vector<SweepCell> &cells, double timeout_seconds, unsigned threads)
{
  std::vector<RunRecord> records(cells.size());
  std::atomic<size_t> next{ 0 };
  auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      const SweepCell &cell = cells[i];
      EnumerationTask task = cell.task;
      task.time_limit = std::chrono::duration<double>(timeout_seconds);
      task.collect_models = false;
      uint64_t emitted = 0;
      auto result = enumerate(*cell.instance, task, [&](const ModelRecord &) { ++emitted; });
      RunRecord &r = records[i];
      r.instance_id = cell.instance_id;
      r.task_label = cell.task_label;
      r.config_label = cell.config_label;
      r.seconds = result.seconds;
      r.complete = result.complete;
      r.models = task.mode == Mode::TopK ? result.models.size() : emitted;
      for (const auto &m : result.models) r.topk_weights.push_back(m.weight);
      r.stats = result.stats;
    }
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, std::max<size_t>(cells.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  return records;
}

double par2(const std::vector<RunRecord> &records, double timeout_seconds)
{
  if (records.empty()) return 0.0;
  double total = 0.0;
  for (const auto &r : records) total += r.complete ? r.seconds : 2.0 * timeout_seconds;
  return total / static_cast<double>(records.size());
}

void write_csv_header(std::ostream &out)
{
  out << "instance,task,config,outcome,seconds,models,decisions,propagations,conflicts,weight_conflicts,"
         "restarts,learned_clauses,blocking_clauses,weight_clauses,peak_clauses,topk_weights\n";
}

void write_csv_row(std::ostream &out, const RunRecord &r)
{
  const auto &s = r.stats;
  out << r.instance_id << ',' << r.task_label << ',' << r.config_label << ',' << (r.complete ? "complete" : "timeout")
      << ',' << r.seconds << ',' << r.models << ',' << s.decisions << ',' << s.propagations << ',' << s.conflicts << ','
      << s.weight_conflicts << ',' << s.restarts << ',' << s.learned_clauses << ',' << s.blocking_clauses << ','
      << s.weight_clauses << ',' << s.peak_clauses << ',';
  for (size_t i = 0; i < r.topk_weights.size(); ++i) out << (i == 0 ? "" : ";") << format_weight(r.topk_weights[i]);
  out << '\n';
}

}// namespace wme::bench
