// Acceptance run: one PASS/FAIL line per criterion. Criterion 8 is informational and never
// fails the run; everything else does.

#include "wme/bench.hpp"
#include "wme/enumeration.hpp"
#include "wme/oracle.hpp"
#include "wme/weight_conflict.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wme;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict
{
  bool pass = true;
  std::string detail;
};

struct Check
{
  Verdict v;
  std::ostringstream why;
  void require(bool ok, const std::string &what)
  {
    if (!ok && v.pass) {
      v.pass = false;
      why << what;
    }
  }
};

Instance make(uint32_t n, const std::vector<std::vector<int>> &clauses, const std::vector<std::pair<double, double>> &w,
  bool log_domain = true)
{
  Instance inst;
  inst.formula.num_vars = n;
  for (const auto &c : clauses) {
    Clause cl;
    for (int x : c) cl.push_back(Lit::from_dimacs(x));
    inst.formula.clauses.push_back(cl);
  }
  inst.weights = WeightTable(n, log_domain);
  for (uint32_t v = 0; v < w.size(); ++v) {
    inst.weights.set(Lit(Var{ v }, true), w[v].first);
    inst.weights.set(Lit(Var{ v }, false), w[v].second);
  }
  return inst;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

EnumerationTask task_for(Mode mode, Backtracking bt, bool pruning)
{
  EnumerationTask t;
  t.mode = mode;
  t.config = SolverConfig::for_style(bt);
  t.config.weight_pruning = pruning;
  return t;
}

double median(std::vector<double> xs)
{
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct PoolEntry
{
  uint64_t seed;
  Instance instance;
  Instance linear;
  double theta;
};

/// The shared random pool: n in [8, 14], ratio 1.5, uniform weights, theta picked among the
/// model weights (or 0.5^n for unsatisfiable draws).
std::vector<PoolEntry> build_pool()
{
  std::vector<PoolEntry> pool;
  std::mt19937_64 rng(2024);
  for (uint64_t seed = 1; pool.size() < 300; ++seed) {
    bench::GeneratorSpec spec;
    spec.num_vars = 8 + static_cast<uint32_t>(rng() % 7);
    spec.clause_ratio = 1.5;
    spec.seed = seed;
    PoolEntry e{ seed, bench::generate_instance(spec, true), bench::generate_instance(spec, false), 0.0 };
    const auto all = oracle::all(e.instance);
    if (all.models.empty()) {
      e.theta = std::pow(0.5, spec.num_vars);
    } else {
      // Spread theta between the heaviest model and a bit below the lightest.
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const double hi = std::log(all.models.front().weight);
      const double lo = std::log(all.models.back().weight) - 0.5;
      e.theta = std::exp(lo + u(rng) * (hi - lo));
    }
    pool.push_back(std::move(e));
  }
  return pool;
}

const std::pair<Backtracking, bool> kConfigs[] = {
  { Backtracking::Chronological, true },
  { Backtracking::Chronological, false },
  { Backtracking::NonChronological, true },
  { Backtracking::NonChronological, false },
};

// --- 1 ------------------------------------------------------------------------------

Verdict criterion1()
{
  Check c;
  const Instance inst = parse_instance(std::string_view("p cnf 3 2\n1 2 0\n3 0\n"
                                                        "w 1 0.6\nw -1 0.4\nw 2 0.8\nw -2 0.2\nw 3 0.5\nw -3 0.5\n"));
  double fastest = 1e9;
  for (int rep = 0; rep < 20; ++rep) {
    for (Backtracking bt : { Backtracking::Chronological, Backtracking::NonChronological }) {
      EnumerationTask t = task_for(Mode::Threshold, bt, true);
      t.theta = 0.05;
      const auto start = Clock::now();
      const auto r = enumerate(inst, t);
      fastest = std::min(fastest, std::chrono::duration<double>(Clock::now() - start).count());
      std::vector<double> w;
      for (const auto &m : r.models) w.push_back(m.weight);
      std::sort(w.begin(), w.end());
      c.require(w.size() == 3, "threshold model count");
      if (w.size() == 3)
        c.require(close(w[0], 0.06, 1e-12) && close(w[1], 0.16, 1e-12) && close(w[2], 0.24, 1e-12), "threshold weights");

      EnumerationTask k = task_for(Mode::TopK, bt, true);
      k.k = 1;
      const auto top = enumerate(inst, k);
      c.require(top.models.size() == 1 && close(top.models[0].weight, 0.24, 1e-12), "top-1");
    }
  }
  c.require(fastest < 1e-3, "runtime");
  c.why << "weights 0.06 0.16 0.24, top-1 0.24, fastest run " << fastest * 1e3 << " ms";
  return { c.v.pass, c.why.str() };
}

// --- 2 ------------------------------------------------------------------------------

Verdict criterion2()
{
  Check c;
  {
    // Pruning: theta 0.2, mu = {~A1, A2}.
    const Instance ex = make(5, {}, { { 0.6, 0.4 }, { 0.3, 0.7 }, { 0.9, 0.1 }, { 0.35, 0.65 }, { 0.5, 0.5 } });
    WeightState s(ex.weights);
    s.assign(Lit::from_dimacs(-1));
    s.assign(Lit::from_dimacs(2));
    c.require(s.weight_conflict(0.2), "pruning example does not conflict");
  }
  const Instance g = make(3, { { 1, 2, -3 } }, { { 0.6, 0.4 }, { 0.8, 0.2 }, { 0.7, 0.3 } });
  {
    // Greedy set on the trail ~A1, A2, ~A3.
    const std::vector<Lit> trail = { Lit::from_dimacs(-1), Lit::from_dimacs(2), Lit::from_dimacs(-3) };
    const auto set = greedy_conflict_set(trail, g.weights, ActiveBound{ std::log(0.2), Admit::AtLeast });
    c.require(set.literals == std::vector<Lit>{ Lit::from_dimacs(-3) }, "greedy set is not {~A3}");
    c.require(weight_conflict_clause(set) == Clause{ Lit::from_dimacs(3) }, "learned clause is not (A3)");
  }
  {
    // Residual-aware backtrack: trail ~A1 A2 A3, new bound 0.224.
    WeightState s(g.weights);
    const std::vector<Lit> trail = { Lit::from_dimacs(-1), Lit::from_dimacs(2), Lit::from_dimacs(3) };
    for (Lit l : trail) s.assign(l);
    const auto r = residual_aware_backtrack(
      trail, [](Lit l) { return static_cast<int>(l.var().index) + 1; }, s,
      ActiveBound{ std::log(0.224 * (1 + 1e-9)), Admit::Above });
    c.require(!r.terminate && r.flip_level == 1, "residual backtrack does not flip A1");
    c.require(close(s.upper_bound(), 0.336, 1e-12), "residual bound is not 0.336");
  }
  {
    // Relevant/irrelevant cases.
    const Instance p = make(5, { { 1, 2 }, { 3 }, { -4, 1 }, { -5, 2 } },
      { { 0.9, 0.1 }, { 0.8, 0.2 }, { 0.7, 0.3 }, { 0.5, 0.5 }, { 0.5, 0.5 } });
    const auto part = partition_weight_relevant(p.weights);
    c.require(part.irrelevant_count == 2 && close(part.irrelevant_factor(), 0.25, 1e-12), "partition");
    const ActiveBound theta_r{ std::log(0.1), Admit::AtLeast };
    c.require(relevant_complete_check(true, std::log(0.9 * 0.2 * 0.7), theta_r) == RelevantCheck::ExtendAndValidate,
      "case 1");
    c.require(relevant_complete_check(true, std::log(0.1 * 0.2 * 0.7), theta_r) == RelevantCheck::WeightConflictTrigger,
      "case 2");
  }
  if (c.v.pass) c.why << "pruning, greedy set, residual backtrack, partition cases 1 and 2 reproduced";
  return { c.v.pass, c.why.str() };
}

// --- 3, 5 ----------------------------------------------------------------------------

class ClauseRecorder : public EnumerationObserver
{
public:
  void on_weight_clause(std::span<const Lit> clause, const ActiveBound & /*bound*/) override
  {
    clauses.emplace_back(clause.begin(), clause.end());
  }
  std::vector<Clause> clauses;
};

Verdict criterion3_and_5(const std::vector<PoolEntry> &pool, Verdict &clause_soundness)
{
  Check c;
  Check p;
  size_t runs = 0;
  size_t clauses = 0;
  const auto start = Clock::now();
  for (const auto &e : pool) {
    const auto expected = oracle::threshold(e.instance, e.theta);
    for (const auto &[bt, pruning] : kConfigs) {
      EnumerationTask t = task_for(Mode::Threshold, bt, pruning);
      t.theta = e.theta;
      ClauseRecorder rec;
      const auto r = enumerate(e.instance, t, {}, &rec);
      ++runs;
      const auto diff = oracle::compare_sets(expected, r.models);
      c.require(r.complete && !diff, "seed " + std::to_string(e.seed) + ": " + diff.value_or("incomplete"));
      for (const auto &cl : rec.clauses) {
        ++clauses;
        for (const auto &m : expected.models) {
          const bool sat = std::any_of(cl.begin(), cl.end(), [&](Lit l) { return m.values[l.var().index] == l.positive(); });
          p.require(sat, "clause falsified by a model at or above theta, seed " + std::to_string(e.seed));
        }
      }
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  c.require(secs < 300, "took longer than 5 minutes");
  p.require(clauses > 0, "no weight-conflict clauses were learned");
  if (c.v.pass) c.why << runs << " runs over " << pool.size() << " instances match brute force in " << secs << " s";
  if (p.v.pass) p.why << clauses << " weight-conflict clauses checked against every model with w >= theta";
  clause_soundness = { p.v.pass, p.why.str() };
  return { c.v.pass, c.why.str() };
}

// --- 4 ------------------------------------------------------------------------------

Verdict criterion4(const std::vector<PoolEntry> &pool)
{
  Check c;
  size_t runs = 0;
  size_t flagged = 0;
  for (const auto &e : pool) {
    for (uint32_t k : { 1U, 3U, 10U }) {
      const auto expected = oracle::top_k(e.instance, k);
      flagged += expected.tie_flagged ? 1 : 0;
      for (const auto &[bt, pruning] : kConfigs) {
        EnumerationTask t = task_for(Mode::TopK, bt, pruning);
        t.k = k;
        const auto r = enumerate(e.instance, t);
        ++runs;
        const auto diff = oracle::compare_top_k(e.instance, expected, r.models);
        c.require(r.complete && !diff,
          "seed " + std::to_string(e.seed) + " k " + std::to_string(k) + ": " + diff.value_or("incomplete"));
      }
    }
  }
  if (c.v.pass) c.why << runs << " top-k runs match brute force (" << flagged << " oracle answers with ties at the cut)";
  return { c.v.pass, c.why.str() };
}

// --- 6 ------------------------------------------------------------------------------

class BoundAuditor : public EnumerationObserver
{
public:
  BoundAuditor(const Instance &inst, uint64_t seed) : m_inst(inst), m_rng(seed) {}

  void on_fixpoint(const Engine &engine) override
  {
    if (m_rng() % 3 != 0) return;// sample
    const std::vector<Lit> partial(engine.trail().begin(), engine.trail().end());
    const auto best = oracle::best_completion(m_inst, partial);
    ++checks;
    if (!best) return;
    ++with_completion;
    if (engine.weight_state().upper_bound() < *best * (1 - 1e-12)) ++violations;
  }

  size_t checks = 0;
  size_t with_completion = 0;
  size_t violations = 0;

private:
  const Instance &m_inst;
  std::mt19937_64 m_rng;
};

Verdict criterion6()
{
  Check c;
  size_t checks = 0;
  size_t with_completion = 0;
  size_t violations = 0;
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    bench::GeneratorSpec spec;
    spec.num_vars = 8 + static_cast<uint32_t>(seed % 5);
    spec.clause_ratio = seed % 2 == 0 ? 1.5 : 3.0;
    spec.seed = 9000 + seed;
    const Instance inst = bench::generate_instance(spec);
    const auto all = oracle::all(inst);
    for (const auto &[bt, pruning] : kConfigs) {
      for (Mode mode : { Mode::Threshold, Mode::TopK }) {
        EnumerationTask t = task_for(mode, bt, pruning);
        t.theta = all.models.empty() ? 0.5 : all.models[all.models.size() / 2].weight;
        t.k = 3;
        BoundAuditor audit(inst, seed);
        enumerate(inst, t, {}, &audit);
        checks += audit.checks;
        with_completion += audit.with_completion;
        violations += audit.violations;
      }
    }
  }
  c.require(violations == 0, std::to_string(violations) + " fixpoints where the bound is below a completion");
  c.require(checks >= 10000, "only " + std::to_string(checks) + " fixpoints sampled");
  if (c.v.pass)
    c.why << checks << " sampled fixpoints (" << with_completion << " with a satisfying completion), bound never below";
  return { c.v.pass, c.why.str() };
}

// --- 7 ------------------------------------------------------------------------------

/// Order-independent fingerprint of a model set.
struct SetHash
{
  uint64_t sum = 0;
  uint64_t count = 0;
  void add(const std::vector<bool> &values)
  {
    uint64_t h = 1469598103934665603ULL;
    for (bool b : values) h = (h ^ (b ? 0x9E37U : 0x79B9U)) * 1099511628211ULL;
    sum += h ^ (h >> 29U);
    ++count;
  }
  bool operator==(const SetHash &) const = default;
};

Verdict criterion7()
{
  Check c;
  std::vector<double> on_decisions;
  std::vector<double> off_decisions;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    bench::GeneratorSpec spec;
    spec.num_vars = 30;
    spec.clause_ratio = 1.5;
    spec.seed = seed;
    const Instance inst = bench::generate_instance(spec);
    SetHash hashes[2];
    for (int pruning = 0; pruning < 2; ++pruning) {
      EnumerationTask t = task_for(Mode::Threshold, Backtracking::Chronological, pruning == 1);
      t.theta = std::pow(0.5, 30);
      t.collect_models = false;
      SetHash &h = hashes[pruning];
      const auto r = enumerate(inst, t, [&h](const ModelRecord &m) { h.add(m.values); });
      c.require(r.complete, "run incomplete");
      (pruning == 1 ? on_decisions : off_decisions).push_back(static_cast<double>(r.stats.decisions));
    }
    c.require(hashes[0] == hashes[1], "model sets differ on seed " + std::to_string(seed));
  }
  const double on = median(on_decisions);
  const double off = median(off_decisions);
  c.require(on < off, "pruning does not lower the median decision count");
  c.why << "median decisions " << on << " with pruning vs " << off << " without; model sets identical";
  return { c.v.pass, c.why.str() };
}

// --- 8 ------------------------------------------------------------------------------

Verdict criterion8()
{
  constexpr double kTimeout = 3.0;
  const auto time_runs = [&](Mode mode, uint32_t n, double ratio, Backtracking bt) {
    std::vector<double> secs;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
      bench::GeneratorSpec spec;
      spec.num_vars = n;
      spec.clause_ratio = ratio;
      spec.seed = seed;
      const Instance inst = bench::generate_instance(spec);
      EnumerationTask t = task_for(mode, bt, true);
      t.k = 1;
      t.theta = std::pow(0.5, n);
      t.collect_models = false;
      t.time_limit = std::chrono::duration<double>(kTimeout);
      const auto r = enumerate(inst, t);
      secs.push_back(r.complete ? r.seconds : 2 * kTimeout);
    }
    return median(secs);
  };
  const double top_ncb = time_runs(Mode::TopK, 60, 4.28, Backtracking::NonChronological);
  const double top_cb = time_runs(Mode::TopK, 60, 4.28, Backtracking::Chronological);
  const double th_cb = time_runs(Mode::Threshold, 35, 1.5, Backtracking::Chronological);
  const double th_ncb = time_runs(Mode::Threshold, 35, 1.5, Backtracking::NonChronological);
  std::ostringstream why;
  why << "top-1 n=60: NCB " << top_ncb << " s vs CB " << top_cb << " s (" << (top_ncb <= top_cb ? "holds" : "does not hold")
      << "); threshold n=35: CB " << th_cb << " s vs NCB " << th_ncb << " s ("
      << (th_cb <= th_ncb ? "holds" : "does not hold") << "); medians, unfinished runs count " << 2 * kTimeout << " s";
  return { top_ncb <= top_cb && th_cb <= th_ncb, why.str() };
}

// --- 9 ------------------------------------------------------------------------------

Verdict criterion9(const std::vector<PoolEntry> &pool)
{
  Check c;
  size_t compared = 0;
  for (const auto &e : pool) {
    for (Backtracking bt : { Backtracking::Chronological, Backtracking::NonChronological }) {
      EnumerationTask t = task_for(Mode::Threshold, bt, true);
      t.theta = e.theta;
      auto a = enumerate(e.instance, t).models;
      auto b = enumerate(e.linear, t).models;
      const auto by_values = [](const ModelRecord &x, const ModelRecord &y) { return x.values < y.values; };
      std::sort(a.begin(), a.end(), by_values);
      std::sort(b.begin(), b.end(), by_values);
      c.require(a.size() == b.size(), "model counts differ on seed " + std::to_string(e.seed));
      for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        c.require(a[i].values == b[i].values && close(a[i].weight, b[i].weight, 1e-9),
          "weights differ on seed " + std::to_string(e.seed));
        ++compared;
      }
    }
  }
  // Chain x1 -> x2 -> ... -> x2000, every literal weighing 0.01.
  constexpr uint32_t kChain = 2000;
  std::vector<std::vector<int>> clauses;
  for (int i = 1; i < static_cast<int>(kChain); ++i) clauses.push_back({ -i, i + 1 });
  const std::vector<std::pair<double, double>> w(kChain, { 0.01, 0.01 });
  EnumerationTask t = task_for(Mode::TopK, Backtracking::NonChronological, true);
  t.k = 1;
  const auto lg = enumerate(make(kChain, clauses, w, true), t);
  const auto ln = enumerate(make(kChain, clauses, w, false), t);
  c.require(lg.models.size() == 1 && ln.models.size() == 1, "chain top-1 missing");
  if (lg.models.size() == 1 && ln.models.size() == 1) {
    c.require(std::isfinite(lg.models[0].log_weight) && close(lg.models[0].log_weight, kChain * std::log(0.01), 1e-12),
      "log weight not finite");
    c.require(ln.models[0].weight == 0.0, "linear weight did not underflow");
    if (c.v.pass)
      c.why << compared << " model weights agree within 1e-9; chain of " << kChain << ": log weight "
            << lg.models[0].log_weight << ", linear weight " << ln.models[0].weight;
  }
  return { c.v.pass, c.why.str() };
}

void report(int n, const Verdict &v, bool soft = false)
{
  std::printf("criterion %d: %s%s %s\n", n, v.pass ? "PASS" : "FAIL", soft ? " (informational)" : "", v.detail.c_str());
  std::fflush(stdout);
}

}// namespace

int main()
{
  bool ok = true;
  const auto hard = [&](int n, const Verdict &v) {
    report(n, v);
    ok = ok && v.pass;
  };
  hard(1, criterion1());
  hard(2, criterion2());
  const auto pool = build_pool();
  Verdict clause_soundness;
  const Verdict c3 = criterion3_and_5(pool, clause_soundness);
  hard(3, c3);
  hard(4, criterion4(pool));
  hard(5, clause_soundness);
  hard(6, criterion6());
  hard(7, criterion7());
  report(8, criterion8(), true);
  hard(9, criterion9(pool));
  return ok ? 0 : 1;
}
