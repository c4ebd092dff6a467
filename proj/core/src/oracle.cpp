#include "wme/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace wme::oracle {

namespace {

  bool satisfies(const CnfFormula &f, const std::vector<bool> &values)
  {
    for (const auto &clause : f.clauses) {
      bool sat = false;
      for (Lit l : clause) {
        if (values[l.var().index] == l.positive()) {
          sat = true;
          break;
        }
      }
      if (!sat) return false;
    }
    return true;
  }

  OracleModel weigh(const WeightTable &table, std::vector<bool> values)
  {
    double product = 1.0;
    double log_sum = 0.0;
    for (uint32_t v = 0; v < values.size(); ++v) {
      const double w = table.weight(Lit(Var{ v }, values[v]));
      product = product * w;
      log_sum = log_sum + std::log(w);
    }
    const double via_log = std::exp(log_sum);
    WME_CONTRACT(std::abs(via_log - product) <= 1e-9 * product, "oracle: linear and log weights disagree");
    return OracleModel{ std::move(values), product, log_sum };
  }

  void sort_models(std::vector<OracleModel> &models)
  {
    std::sort(models.begin(), models.end(), [](const OracleModel &a, const OracleModel &b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      return a.values < b.values;
    });
  }

  bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

  std::string show(const std::vector<bool> &values)
  {
    std::string s;
    for (uint32_t v = 0; v < values.size(); ++v) {
      s += values[v] ? "" : "-";
      s += std::to_string(v + 1) + ' ';
    }
    return s + '0';
  }

}// namespace

OracleResult all(const Instance &instance)
{
  const uint32_t n = instance.formula.num_vars;
  WME_CONTRACT(n <= kMaxVars, "oracle: too many variables for brute force");
  OracleResult out;
  std::vector<bool> values(n);
  for (uint64_t mask = 0; mask < (uint64_t{ 1 } << n); ++mask) {
    for (uint32_t v = 0; v < n; ++v) values[v] = ((mask >> v) & 1U) != 0;
    if (satisfies(instance.formula, values)) out.models.push_back(weigh(instance.weights, values));
  }
  sort_models(out.models);
  return out;
}

OracleResult threshold(const Instance &instance, double theta)
{
  OracleResult out = all(instance);
  std::erase_if(out.models, [&](const OracleModel &m) { return !(m.weight >= theta); });
  return out;
}

OracleResult top_k(const Instance &instance, uint32_t k)
{
  WME_CONTRACT(k >= 1, "oracle: k must be positive");
  OracleResult out = all(instance);
  if (out.models.size() <= k) return out;
  const double kth = out.models[k - 1].weight;
  out.kth_weight = kth;
  out.tie_group = static_cast<size_t>(
    std::count_if(out.models.begin(), out.models.end(), [&](const OracleModel &m) { return m.weight == kth; }));
  out.tie_flagged = out.models[k].weight == kth;
  out.models.resize(k);
  return out;
}

std::optional<std::string> compare_sets(const OracleResult &expected, const std::vector<ModelRecord> &found)
{
  std::set<std::vector<bool>> seen;
  for (const auto &m : found) {
    if (!seen.insert(m.values).second) return "duplicate model " + show(m.values);
  }
  if (found.size() != expected.models.size()) {
    std::ostringstream msg;
    msg << "expected " << expected.models.size() << " models, found " << found.size();
    return msg.str();
  }
  for (const auto &e : expected.models) {
    if (seen.count(e.values) == 0) return "missing model " + show(e.values);
  }
  for (const auto &m : found) {
    const auto it = std::find_if(
      expected.models.begin(), expected.models.end(), [&](const OracleModel &e) { return e.values == m.values; });
    if (!close(it->weight, m.weight)) return "weight mismatch on " + show(m.values);
  }
  return std::nullopt;
}

std::optional<std::string> compare_top_k(const Instance &instance, const OracleResult &expected,
  const std::vector<ModelRecord> &found)
{
  std::set<std::vector<bool>> seen;
  std::vector<double> weights;
  for (const auto &m : found) {
    if (!seen.insert(m.values).second) return "duplicate model " + show(m.values);
    if (!satisfies(instance.formula, m.values)) return "not a model: " + show(m.values);
    const OracleModel w = weigh(instance.weights, m.values);
    if (!close(w.weight, m.weight)) return "reported weight is wrong for " + show(m.values);
    weights.push_back(w.weight);
  }
  if (weights.size() != expected.models.size()) {
    std::ostringstream msg;
    msg << "expected " << expected.models.size() << " models, found " << weights.size();
    return msg.str();
  }
  std::sort(weights.begin(), weights.end(), std::greater<>());
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!close(weights[i], expected.models[i].weight)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "rank " << i + 1 << ": expected weight " << expected.models[i].weight << ", found " << weights[i];
      return msg.str();
    }
  }
  return std::nullopt;
}

std::optional<double> best_completion(const Instance &instance, const std::vector<Lit> &partial)
{
  const uint32_t n = instance.formula.num_vars;
  WME_CONTRACT(n <= kMaxVars, "oracle: too many variables for brute force");
  std::vector<int8_t> fixed(n, -1);
  for (Lit l : partial) fixed[l.var().index] = l.positive() ? 1 : 0;
  std::vector<uint32_t> free_vars;
  for (uint32_t v = 0; v < n; ++v)
    if (fixed[v] < 0) free_vars.push_back(v);

  std::optional<double> best;
  std::vector<bool> values(n);
  for (uint32_t v = 0; v < n; ++v) values[v] = fixed[v] == 1;
  for (uint64_t mask = 0; mask < (uint64_t{ 1 } << free_vars.size()); ++mask) {
    for (size_t i = 0; i < free_vars.size(); ++i) values[free_vars[i]] = ((mask >> i) & 1U) != 0;
    if (!satisfies(instance.formula, values)) continue;
    const double w = weigh(instance.weights, values).weight;
    if (!best || w > *best) best = w;
  }
  return best;
}

}// namespace wme::oracle
