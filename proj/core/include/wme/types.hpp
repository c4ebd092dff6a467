#ifndef WME_TYPES_HPP
#define WME_TYPES_HPP

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

namespace wme {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

#define WME_CONTRACT(cond, msg)                                                                     \
  do {                                                                                              \
    if (!(cond)) throw ::wme::ContractViolation(msg);                                              \
  } while (0)

/// 0-based variable handle. DIMACS variable `i` maps to `Var{i - 1}`.
struct Var
{
  uint32_t index = 0;

  [[nodiscard]] constexpr int dimacs() const { return static_cast<int>(index) + 1; }
  constexpr auto operator<=>(const Var &) const = default;
};

/// Literal packed as `2 * var + negated`, MiniSat style.
class Lit
{
public:
  constexpr Lit() = default;
  constexpr Lit(Var v, bool positive) : m_code(2 * v.index + (positive ? 0U : 1U)) {}

  static constexpr Lit from_code(uint32_t code)
  {
    Lit l;
    l.m_code = code;
    return l;
  }
  /// Builds a literal from a nonzero signed DIMACS integer.
  static Lit from_dimacs(int signed_lit)
  {
    if (signed_lit == 0) throw std::invalid_argument("literal 0 is not a literal");
    return Lit(Var{ static_cast<uint32_t>(std::abs(signed_lit)) - 1 }, signed_lit > 0);
  }

  [[nodiscard]] constexpr Var var() const { return Var{ m_code >> 1U }; }
  [[nodiscard]] constexpr bool positive() const { return (m_code & 1U) == 0; }
  [[nodiscard]] constexpr uint32_t code() const { return m_code; }
  [[nodiscard]] constexpr int dimacs() const { return positive() ? var().dimacs() : -var().dimacs(); }

  constexpr Lit operator~() const { return from_code(m_code ^ 1U); }
  constexpr auto operator<=>(const Lit &) const = default;

private:
  uint32_t m_code = 0;
};

std::string to_string(Lit l);

}// namespace wme

template<> struct std::hash<wme::Lit>
{
  size_t operator()(wme::Lit l) const noexcept { return std::hash<uint32_t>{}(l.code()); }
};

#endif
