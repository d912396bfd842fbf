#pragma once

// Arithmetic expressions in t and x for command-line problem specs.
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := NUMBER | 't' | 'x' | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//
// so ^ is right-associative and binds tighter than unary minus: -t^2 = -(t^2).
// Evaluation is real-valued. Anything without a real value (log of a
// nonpositive number, sqrt of a negative one, division by zero, a negative
// base with a non-integer exponent, overflow) is "undefined" (std::nullopt).
// 0^0 evaluates to 1.

#include <confcalc/core.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace confcalc::expr {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Exp, Log, Sqrt, Abs, Pow };

std::string_view name(Function fn);
std::size_t arity(Function fn);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Number {
  double value;  // finite, non-negative: the grammar has no signed literals
};
struct Variable {
  char name;  // 't' or 'x'
};
struct Negate {
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  Function fn;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<Number, Variable, Negate, Binary, Call> node;
};

/// Malformed input. offset is the byte position of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset, std::string expected);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// A name that is neither a variable nor a known function.
class UnknownIdentifier : public SyntaxError {
 public:
  UnknownIdentifier(const std::string& identifier, std::size_t offset);
  const std::string& identifier() const noexcept { return identifier_; }

 private:
  std::string identifier_;
};

/// The expression uses x but no x was supplied.
class MissingVariable : public Error {
 public:
  using Error::Error;
};

/// Maximum nesting depth accepted by parse().
inline constexpr std::size_t kMaxDepth = 200;

ExprPtr parse(std::string_view source);

/// Canonical fully parenthesised form; parse(print(e)) is structurally equal to e.
std::string print(const Expr& e);

bool structurally_equal(const Expr& lhs, const Expr& rhs);
bool references_x(const Expr& e);

/// Flattened postfix program; the evaluation path used by functions built from expressions.
class Program {
 public:
  explicit Program(const Expr& e);

  std::optional<double> run(double t, double x) const;
  bool uses_x() const noexcept { return uses_x_; }

 private:
  enum class Op : unsigned char { Push, LoadT, LoadX, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt, Abs };
  struct Instr {
    Op op;
    double value;
  };
  void emit(const Expr& e);

  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
  bool uses_x_ = false;
};

/// Evaluates e at (t, x). Throws MissingVariable if e references x and x is absent.
std::optional<double> evaluate(const Expr& e, double t, std::optional<double> x = std::nullopt);

/// f(t) from an expression in t only (throws MissingVariable if it uses x).
ScalarFunction to_function(const ExprPtr& e, std::string label = {});

/// F(t, x) from an expression in t and x.
RightSide to_right_side(const ExprPtr& e);

/// Real-valued primitive semantics shared by every evaluator.
namespace semantics {
std::optional<double> divide(double lhs, double rhs);
std::optional<double> power(double base, double exponent);
std::optional<double> apply(Function fn, double arg);
}  // namespace semantics

}  // namespace confcalc::expr
