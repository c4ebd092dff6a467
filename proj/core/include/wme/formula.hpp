#ifndef WME_FORMULA_HPP
#define WME_FORMULA_HPP

#include "wme/types.hpp"

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wme {

using Clause = std::vector<Lit>;

/// A CNF formula over variables 1..num_vars (DIMACS numbering).
struct CnfFormula
{
  uint32_t num_vars = 0;
  std::vector<Clause> clauses;

  /// True when every clause has a literal in `values` (indexed by variable).
  [[nodiscard]] bool satisfied_by(const std::vector<bool> &values) const;
};

/// Positive weight per literal, with `best(A) = max(w(A), w(~A))` cached.
///
/// Both the linear and the natural-log value of every weight are stored; `log_domain()`
/// selects which representation the solver arithmetic runs in.
class WeightTable
{
public:
  WeightTable() = default;
  explicit WeightTable(uint32_t num_vars, bool log_domain = true);

  [[nodiscard]] uint32_t num_vars() const { return m_num_vars; }
  [[nodiscard]] bool log_domain() const { return m_log_domain; }
  void set_log_domain(bool on) { m_log_domain = on; }

  /// Sets w(lit). `text` is the decimal spelling as read from input, kept for serialization.
  /// Throws InstanceError(InvalidWeight) unless the value is finite and > 0.
  void set(Lit lit, double weight, std::optional<std::string> text = std::nullopt);

  [[nodiscard]] double weight(Lit lit) const { return m_weight[lit.code()]; }
  [[nodiscard]] double log_weight(Lit lit) const { return m_log_weight[lit.code()]; }
  [[nodiscard]] double best(Var v) const { return m_best[v.index]; }
  [[nodiscard]] double log_best(Var v) const { return m_log_best[v.index]; }
  /// Weight in the active domain: log value in log mode, linear otherwise.
  [[nodiscard]] double score(Lit lit) const { return m_log_domain ? log_weight(lit) : weight(lit); }
  [[nodiscard]] double best_score(Var v) const { return m_log_domain ? log_best(v) : best(v); }

  [[nodiscard]] bool declared(Lit lit) const { return m_text[lit.code()].has_value(); }
  [[nodiscard]] const std::optional<std::string> &declared_text(Lit lit) const { return m_text[lit.code()]; }

  /// Both polarities carry bitwise-equal weights.
  [[nodiscard]] bool polarity_neutral(Var v) const
  {
    return weight(Lit(v, true)) == weight(Lit(v, false));
  }

  bool operator==(const WeightTable &) const = default;

private:
  void refresh_best(Var v);

  uint32_t m_num_vars = 0;
  bool m_log_domain = true;
  std::vector<double> m_weight;
  std::vector<double> m_log_weight;
  std::vector<double> m_best;
  std::vector<double> m_log_best;
  std::vector<std::optional<std::string>> m_text;
};

struct Instance
{
  CnfFormula formula;
  WeightTable weights;
};

enum class InstanceErrorKind {
  MalformedHeader,
  MalformedLine,
  LiteralOutOfRange,
  ClauseCountMismatch,
  InvalidWeight,
  DuplicateWeight,
  IncompleteAssignment,
};

class InstanceError : public std::runtime_error
{
public:
  InstanceError(InstanceErrorKind kind, const std::string &what) : std::runtime_error(what), m_kind(kind) {}
  [[nodiscard]] InstanceErrorKind kind() const { return m_kind; }

private:
  InstanceErrorKind m_kind;
};

/// Reads DIMACS CNF with optional `w <lit> <weight>` lines. Tautologies and duplicate literals
/// are dropped from clauses; undeclared literal weights default to 1.0.
Instance parse_instance(std::istream &in, bool log_domain = true);
Instance parse_instance(std::string_view text, bool log_domain = true);
Instance load_instance(const std::string &path, bool log_domain = true);

/// Writes the instance in the same format `parse_instance` reads. Declared weights are
/// written with their original text, so parse/write/parse is lossless.
std::string write_instance(const Instance &instance);
void save_instance(const Instance &instance, const std::string &path);

/// w(model) = product of the literal weights. `model` must assign every variable exactly once.
/// In log mode the product is taken as exp of the log sum.
double model_weight(const WeightTable &table, std::span<const Lit> model);
double model_log_weight(const WeightTable &table, std::span<const Lit> model);

/// Value-vector overloads (index = variable).
double model_weight(const WeightTable &table, const std::vector<bool> &values);
double model_log_weight(const WeightTable &table, const std::vector<bool> &values);

/// Shortest decimal text that round-trips to `value`.
std::string format_weight(double value);

}// namespace wme

#endif
