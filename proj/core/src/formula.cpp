#include "wme/formula.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wme {

std::string to_string(Lit l) { return std::to_string(l.dimacs()); }

bool CnfFormula::satisfied_by(const std::vector<bool> &values) const
{
  return std::all_of(clauses.begin(), clauses.end(), [&](const Clause &c) {
    return std::any_of(c.begin(), c.end(), [&](Lit l) { return values[l.var().index] == l.positive(); });
  });
}

WeightTable::WeightTable(uint32_t num_vars, bool log_domain)
  : m_num_vars(num_vars), m_log_domain(log_domain), m_weight(2 * size_t{ num_vars }, 1.0),
    m_log_weight(2 * size_t{ num_vars }, 0.0), m_best(num_vars, 1.0), m_log_best(num_vars, 0.0),
    m_text(2 * size_t{ num_vars })
{}

void WeightTable::set(Lit lit, double weight, std::optional<std::string> text)
{
  WME_CONTRACT(lit.var().index < m_num_vars, "weight for literal outside the table");
  if (!std::isfinite(weight) || !(weight > 0.0)) {
    throw InstanceError(InstanceErrorKind::InvalidWeight,
      "weight of literal " + to_string(lit) + " must be a positive finite number");
  }
  m_weight[lit.code()] = weight;
  m_log_weight[lit.code()] = std::log(weight);
  m_text[lit.code()] = std::move(text);
  refresh_best(lit.var());
}

void WeightTable::refresh_best(Var v)
{
  const Lit pos(v, true);
  const Lit neg(v, false);
  const bool pos_wins = weight(pos) >= weight(neg);
  m_best[v.index] = pos_wins ? weight(pos) : weight(neg);
  m_log_best[v.index] = pos_wins ? log_weight(pos) : log_weight(neg);
}

namespace {

  std::vector<std::string_view> split_ws(std::string_view line)
  {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) != 0) ++i;
      const size_t start = i;
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])) == 0) ++i;
      if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
  }

  std::optional<long long> to_int(std::string_view tok)
  {
    long long v = 0;
    const auto *end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || p != end) return std::nullopt;
    return v;
  }

  std::optional<double> to_weight(std::string_view tok)
  {
    // Plain decimal or scientific notation only; no hex floats, inf or nan spellings.
    if (tok.empty()) return std::nullopt;
    for (char ch : tok) {
      if (std::isdigit(static_cast<unsigned char>(ch)) == 0 && ch != '.' && ch != 'e' && ch != 'E' && ch != '+'
          && ch != '-')
        return std::nullopt;
    }
    double v = 0;
    const auto *end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || p != end) return std::nullopt;
    return v;
  }

  [[noreturn]] void fail(InstanceErrorKind kind, size_t line_no, const std::string &msg)
  {
    throw InstanceError(kind, "line " + std::to_string(line_no) + ": " + msg);
  }

  Clause normalize(const std::vector<Lit> &raw, bool &tautology)
  {
    Clause out;
    tautology = false;
    for (Lit l : raw) {
      if (std::find(out.begin(), out.end(), ~l) != out.end()) {
        tautology = true;
        return {};
      }
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
  }

}// namespace

Instance parse_instance(std::istream &in, bool log_domain)
{
  Instance inst;
  bool have_header = false;
  long long declared_clauses = 0;
  long long seen_clauses = 0;
  std::vector<Lit> pending;
  std::string line;
  size_t line_no = 0;
  bool stopped = false;

  auto check_lit = [&](long long v) {
    if (v == 0 || std::llabs(v) > static_cast<long long>(inst.formula.num_vars)) {
      fail(InstanceErrorKind::LiteralOutOfRange, line_no,
        "literal " + std::to_string(v) + " outside 1.." + std::to_string(inst.formula.num_vars));
    }
    return Lit::from_dimacs(static_cast<int>(v));
  };

  while (!stopped && std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    const std::string_view head = toks.front();
    if (head == "c" || head.front() == 'c') continue;
    if (head == "%") {
      // SATLIB trailer
      stopped = true;
      break;
    }
    if (head == "p") {
      if (have_header) fail(InstanceErrorKind::MalformedHeader, line_no, "duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf") fail(InstanceErrorKind::MalformedHeader, line_no, "expected 'p cnf <vars> <clauses>'");
      auto nv = to_int(toks[2]);
      auto nc = to_int(toks[3]);
      if (!nv || !nc || *nv < 0 || *nc < 0 || *nv > (1LL << 30))
        fail(InstanceErrorKind::MalformedHeader, line_no, "bad header counts");
      inst.formula.num_vars = static_cast<uint32_t>(*nv);
      inst.weights = WeightTable(inst.formula.num_vars, log_domain);
      declared_clauses = *nc;
      have_header = true;
      continue;
    }
    if (!have_header) fail(InstanceErrorKind::MalformedHeader, line_no, "content before 'p cnf' header");

    if (head == "w") {
      if (toks.size() != 3) fail(InstanceErrorKind::MalformedLine, line_no, "expected 'w <lit> <weight>'");
      auto v = to_int(toks[1]);
      if (!v) fail(InstanceErrorKind::MalformedLine, line_no, "bad literal in weight line");
      const Lit lit = check_lit(*v);
      auto weight = to_weight(toks[2]);
      if (!weight) fail(InstanceErrorKind::InvalidWeight, line_no, "unparseable weight '" + std::string(toks[2]) + "'");
      if (inst.weights.declared(lit))
        fail(InstanceErrorKind::DuplicateWeight, line_no, "weight for literal " + to_string(lit) + " declared twice");
      try {
        inst.weights.set(lit, *weight, std::string(toks[2]));
      } catch (const InstanceError &e) {
        fail(InstanceErrorKind::InvalidWeight, line_no, e.what());
      }
      continue;
    }

    for (auto tok : toks) {
      auto v = to_int(tok);
      if (!v) fail(InstanceErrorKind::MalformedLine, line_no, "bad token '" + std::string(tok) + "'");
      if (*v == 0) {
        bool tautology = false;
        Clause c = normalize(pending, tautology);
        pending.clear();
        ++seen_clauses;
        if (!tautology) inst.formula.clauses.push_back(std::move(c));
      } else {
        pending.push_back(check_lit(*v));
      }
    }
  }

  if (!have_header) throw InstanceError(InstanceErrorKind::MalformedHeader, "missing 'p cnf' header");
  if (!pending.empty()) throw InstanceError(InstanceErrorKind::MalformedLine, "last clause is not terminated by 0");
  if (seen_clauses != declared_clauses) {
    throw InstanceError(InstanceErrorKind::ClauseCountMismatch,
      "header declares " + std::to_string(declared_clauses) + " clauses, found " + std::to_string(seen_clauses));
  }
  return inst;
}

Instance parse_instance(std::string_view text, bool log_domain)
{
  std::istringstream in{ std::string(text) };
  return parse_instance(in, log_domain);
}

Instance load_instance(const std::string &path, bool log_domain)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_instance(in, log_domain);
}

std::string format_weight(double value)
{
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

std::string write_instance(const Instance &instance)
{
  std::ostringstream out;
  const auto &f = instance.formula;
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto &c : f.clauses) {
    for (Lit l : c) out << l.dimacs() << ' ';
    out << "0\n";
  }
  for (uint32_t v = 0; v < f.num_vars; ++v) {
    for (bool pos : { true, false }) {
      const Lit l(Var{ v }, pos);
      if (const auto &text = instance.weights.declared_text(l)) out << "w " << l.dimacs() << ' ' << *text << '\n';
    }
  }
  return out.str();
}

void save_instance(const Instance &instance, const std::string &path)
{
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << write_instance(instance);
}

namespace {

  std::vector<Lit> checked_model(const WeightTable &table, std::span<const Lit> model)
  {
    std::vector<int8_t> seen(table.num_vars(), 0);
    for (Lit l : model) {
      if (l.var().index >= table.num_vars() || seen[l.var().index] != 0)
        throw InstanceError(InstanceErrorKind::IncompleteAssignment, "model assigns a variable twice or out of range");
      seen[l.var().index] = 1;
    }
    if (model.size() != table.num_vars())
      throw InstanceError(InstanceErrorKind::IncompleteAssignment, "model does not assign every variable");
    return { model.begin(), model.end() };
  }

  std::vector<Lit> to_lits(const WeightTable &table, const std::vector<bool> &values)
  {
    if (values.size() != table.num_vars())
      throw InstanceError(InstanceErrorKind::IncompleteAssignment, "model does not assign every variable");
    std::vector<Lit> lits;
    lits.reserve(values.size());
    for (uint32_t v = 0; v < values.size(); ++v) lits.emplace_back(Var{ v }, values[v]);
    return lits;
  }

}// namespace

double model_log_weight(const WeightTable &table, std::span<const Lit> model)
{
  double sum = 0.0;
  for (Lit l : checked_model(table, model)) sum += table.log_weight(l);
  return sum;
}

double model_weight(const WeightTable &table, std::span<const Lit> model)
{
  if (table.log_domain()) return std::exp(model_log_weight(table, model));
  double product = 1.0;
  for (Lit l : checked_model(table, model)) product *= table.weight(l);
  return product;
}

double model_weight(const WeightTable &table, const std::vector<bool> &values)
{
  return model_weight(table, to_lits(table, values));
}

double model_log_weight(const WeightTable &table, const std::vector<bool> &values)
{
  return model_log_weight(table, to_lits(table, values));
}

}// namespace wme
