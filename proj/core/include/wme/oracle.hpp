#ifndef WME_ORACLE_HPP
#define WME_ORACLE_HPP

#include "wme/enumeration.hpp"
#include "wme/formula.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wme::oracle {

/// Largest variable count the brute-force routines accept.
inline constexpr uint32_t kMaxVars = 24;

struct OracleModel
{
  std::vector<bool> values;
  double weight = 0.0;
  double log_weight = 0.0;
};

struct OracleResult
{
  /// Sorted by weight descending; equal weights by assignment (variable 1 first, false < true).
  std::vector<OracleModel> models;
  /// Top-k only: weight of the k-th model, and how many models in the full set share it.
  std::optional<double> kth_weight;
  size_t tie_group = 0;
  /// Top-k only: the tie group straddles the cut, so other selections are equally valid.
  bool tie_flagged = false;
};

/// Every satisfying assignment with its weight. Weights are computed here with plain
/// products and log sums, independent of the solver, and cross-checked against each other.
OracleResult all(const Instance &instance);
/// Models with w >= theta.
OracleResult threshold(const Instance &instance, double theta);
/// The k heaviest models, plus tie-group annotation.
OracleResult top_k(const Instance &instance, uint32_t k);

/// Checks that `found` is exactly the expected model set (any order). Returns a description of
/// the first difference, or nothing on a match.
std::optional<std::string> compare_sets(const OracleResult &expected, const std::vector<ModelRecord> &found);

/// Checks a top-k answer: distinct genuine models of the formula whose sorted weights equal the
/// oracle's top-k weights within relative 1e-9. Ties at the cut may be resolved either way.
std::optional<std::string> compare_top_k(const Instance &instance, const OracleResult &expected,
  const std::vector<ModelRecord> &found);

/// Heaviest completion of `partial` (literals fixed) that satisfies the formula, if any.
std::optional<double> best_completion(const Instance &instance, const std::vector<Lit> &partial);

}// namespace wme::oracle

#endif
