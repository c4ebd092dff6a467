#ifndef WME_TESTS_SUPPORT_HPP
#define WME_TESTS_SUPPORT_HPP

#include "wme/bench.hpp"
#include "wme/enumeration.hpp"
#include "wme/formula.hpp"

#include <cmath>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace wme::testing {

inline Lit L(int dimacs) { return Lit::from_dimacs(dimacs); }

inline std::vector<Lit> lits(std::initializer_list<int> xs)
{
  std::vector<Lit> out;
  for (int x : xs) out.push_back(L(x));
  return out;
}

/// (A1 v A2) & A3 with weights 0.6/0.4, 0.8/0.2, 0.5/0.5.
inline const char *kThreeModels = "p cnf 3 2\n1 2 0\n3 0\n"
                             "w 1 0.6\nw -1 0.4\nw 2 0.8\nw -2 0.2\nw 3 0.5\nw -3 0.5\n";

/// Builds an instance from clauses and per-variable (positive, negative) weights.
inline Instance make_instance(uint32_t n, const std::vector<std::vector<int>> &clauses,
  const std::vector<std::pair<double, double>> &weights, bool log_domain = true)
{
  Instance inst;
  inst.formula.num_vars = n;
  for (const auto &c : clauses) {
    Clause cl;
    for (int x : c) cl.push_back(L(x));
    inst.formula.clauses.push_back(cl);
  }
  inst.weights = WeightTable(n, log_domain);
  for (uint32_t v = 0; v < weights.size(); ++v) {
    inst.weights.set(Lit(Var{ v }, true), weights[v].first);
    inst.weights.set(Lit(Var{ v }, false), weights[v].second);
  }
  return inst;
}

inline Instance random_instance(uint32_t n, double ratio, uint64_t seed, bool log_domain = true)
{
  bench::GeneratorSpec spec;
  spec.num_vars = n;
  spec.clause_ratio = ratio;
  spec.seed = seed;
  return bench::generate_instance(spec, log_domain);
}

/// Makes roughly `fraction` of the variables polarity-neutral (equal weights on both sides).
inline void neutralize(Instance &inst, double fraction, uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double choices[] = { 0.5, 0.25, 1.0 };
  for (uint32_t v = 0; v < inst.formula.num_vars; ++v) {
    if (u(rng) >= fraction) continue;
    const double w = choices[rng() % 3];
    inst.weights.set(Lit(Var{ v }, true), w);
    inst.weights.set(Lit(Var{ v }, false), w);
  }
}

/// Independent product over the values vector.
inline double product_weight(const Instance &inst, const std::vector<bool> &values)
{
  double p = 1.0;
  for (uint32_t v = 0; v < values.size(); ++v) p *= inst.weights.weight(Lit(Var{ v }, values[v]));
  return p;
}

inline bool rel_close(double a, double b, double tol)
{
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline EnumerationTask threshold_task(double theta, Backtracking bt, bool pruning = true)
{
  EnumerationTask t;
  t.mode = Mode::Threshold;
  t.theta = theta;
  t.config = SolverConfig::for_style(bt);
  t.config.weight_pruning = pruning;
  return t;
}

inline EnumerationTask topk_task(uint32_t k, Backtracking bt, bool pruning = true)
{
  EnumerationTask t;
  t.mode = Mode::TopK;
  t.k = k;
  t.config = SolverConfig::for_style(bt);
  t.config.weight_pruning = pruning;
  return t;
}

}// namespace wme::testing

#endif
