#include <confcalc/exprparse.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace confcalc::expr {

namespace {

struct FunctionInfo {
  std::string_view name;
  Function fn;
  std::size_t arity;
};

constexpr std::array<FunctionInfo, 7> kFunctions{{
    {"sin", Function::Sin, 1},
    {"cos", Function::Cos, 1},
    {"exp", Function::Exp, 1},
    {"log", Function::Log, 1},
    {"sqrt", Function::Sqrt, 1},
    {"abs", Function::Abs, 1},
    {"pow", Function::Pow, 2},
}};

ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse_all() {
    skip_space();
    if (pos_ == src_.size()) fail("empty expression", "expression");
    ExprPtr e = parse_expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected character", "operator or end of input");
    return e;
  }

 private:
  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) p.fail("expression nested too deeply", "shallower expression");
    }
    ~DepthGuard() { --p.depth_; }
  };

  [[noreturn]] void fail(const std::string& what, const std::string& expected) const {
    std::string msg = what + " at offset " + std::to_string(pos_) + " (expected " + expected + ")";
    throw SyntaxError(msg, pos_, expected);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail("missing '" + std::string(1, c) + "'", "'" + std::string(1, c) + "'");
  }

  ExprPtr parse_expr() {
    DepthGuard guard(*this);
    ExprPtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Binary{BinaryOp::Add, lhs, parse_term()});
      } else if (accept('-')) {
        lhs = make(Binary{BinaryOp::Sub, lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      if (accept('*')) {
        lhs = make(Binary{BinaryOp::Mul, lhs, parse_factor()});
      } else if (accept('/')) {
        lhs = make(Binary{BinaryOp::Div, lhs, parse_factor()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    DepthGuard guard(*this);
    if (accept('-')) return make(Negate{parse_factor()});
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (accept('^')) return make(Binary{BinaryOp::Pow, base, parse_factor()});
    return base;
  }

  ExprPtr parse_atom() {
    skip_space();
    if (pos_ == src_.size()) fail("unexpected end of input", "number, variable, function or '('");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    if (accept('(')) {
      ExprPtr inner = parse_expr();
      expect(')');
      return inner;
    }
    fail("unexpected character", "number, variable, function or '('");
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail("malformed number", "digit");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent", "digit");
    }
    double value = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      pos_ = start;
      fail("number out of range", "finite number");
    }
    return make(Number{value});
  }

  ExprPtr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view id = src_.substr(start, pos_ - start);
    if (id == "t" || id == "x") return make(Variable{id[0]});
    for (const auto& info : kFunctions) {
      if (info.name != id) continue;
      expect('(');
      std::vector<ExprPtr> args;
      args.push_back(parse_expr());
      while (accept(',')) args.push_back(parse_expr());
      const std::size_t close = pos_;
      expect(')');
      if (args.size() != info.arity) {
        pos_ = close;
        fail(std::string(info.name) + " takes " + std::to_string(info.arity) + " argument(s), got " +
                 std::to_string(args.size()),
             std::to_string(info.arity) + " argument(s)");
      }
      return make(Call{info.fn, std::move(args)});
    }
    throw UnknownIdentifier(std::string(id), start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

bool is_integer(double v) { return std::floor(v) == v; }

void print_to(const Expr& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          std::array<char, 64> buf{};
          auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
          out.append(buf.data(), ptr);
        } else if constexpr (std::is_same_v<T, Variable>) {
          out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += "(-";
          print_to(*n.operand, out);
          out += ")";
        } else if constexpr (std::is_same_v<T, Binary>) {
          static constexpr std::array<char, 5> ops{'+', '-', '*', '/', '^'};
          out += "(";
          print_to(*n.lhs, out);
          out.push_back(ops[static_cast<std::size_t>(n.op)]);
          print_to(*n.rhs, out);
          out += ")";
        } else {
          out += name(n.fn);
          out += "(";
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ",";
            print_to(*n.args[i], out);
          }
          out += ")";
        }
      },
      e.node);
}

}  // namespace

std::string_view name(Function fn) { return kFunctions[static_cast<std::size_t>(fn)].name; }
std::size_t arity(Function fn) { return kFunctions[static_cast<std::size_t>(fn)].arity; }

SyntaxError::SyntaxError(const std::string& message, std::size_t offset, std::string expected)
    : Error(message), offset_(offset), expected_(std::move(expected)) {}

UnknownIdentifier::UnknownIdentifier(const std::string& identifier, std::size_t offset)
    : SyntaxError("unknown identifier '" + identifier + "' at offset " + std::to_string(offset) +
                      " (expected t, x or one of sin, cos, exp, log, sqrt, abs, pow)",
                  offset, "t, x or a function name"),
      identifier_(identifier) {}

ExprPtr parse(std::string_view source) { return Parser(source).parse_all(); }

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out);
  return out;
}

bool structurally_equal(const Expr& lhs, const Expr& rhs) {
  if (lhs.node.index() != rhs.node.index()) return false;
  return std::visit(
      [&](const auto& l) -> bool {
        using T = std::decay_t<decltype(l)>;
        const auto& r = std::get<T>(rhs.node);
        if constexpr (std::is_same_v<T, Number>) {
          return l.value == r.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return l.name == r.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return structurally_equal(*l.operand, *r.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return l.op == r.op && structurally_equal(*l.lhs, *r.lhs) && structurally_equal(*l.rhs, *r.rhs);
        } else {
          if (l.fn != r.fn || l.args.size() != r.args.size()) return false;
          for (std::size_t i = 0; i < l.args.size(); ++i)
            if (!structurally_equal(*l.args[i], *r.args[i])) return false;
          return true;
        }
      },
      lhs.node);
}

bool references_x(const Expr& e) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          return false;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return n.name == 'x';
        } else if constexpr (std::is_same_v<T, Negate>) {
          return references_x(*n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return references_x(*n.lhs) || references_x(*n.rhs);
        } else {
          for (const auto& a : n.args)
            if (references_x(*a)) return true;
          return false;
        }
      },
      e.node);
}

namespace semantics {

std::optional<double> divide(double lhs, double rhs) {
  if (rhs == 0.0) return std::nullopt;
  return lhs / rhs;
}

std::optional<double> power(double base, double exponent) {
  if (base == 0.0 && exponent == 0.0) return 1.0;
  if (base < 0.0 && !is_integer(exponent)) return std::nullopt;
  return std::pow(base, exponent);
}

std::optional<double> apply(Function fn, double arg) {
  switch (fn) {
    case Function::Sin: return std::sin(arg);
    case Function::Cos: return std::cos(arg);
    case Function::Exp: return std::exp(arg);
    case Function::Log:
      if (!(arg > 0.0)) return std::nullopt;
      return std::log(arg);
    case Function::Sqrt:
      if (arg < 0.0) return std::nullopt;
      return std::sqrt(arg);
    case Function::Abs: return std::abs(arg);
    case Function::Pow: break;
  }
  return std::nullopt;
}

}  // namespace semantics

Program::Program(const Expr& e) {
  emit(e);
  // stack depth is bounded by the postfix length
  std::size_t depth = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push:
      case Op::LoadT:
      case Op::LoadX: ++depth; break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow: --depth; break;
      default: break;
    }
    max_stack_ = std::max(max_stack_, depth);
  }
}

void Program::emit(const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Number>) {
          code_.push_back({Op::Push, n.value});
        } else if constexpr (std::is_same_v<T, Variable>) {
          if (n.name == 'x') uses_x_ = true;
          code_.push_back({n.name == 'x' ? Op::LoadX : Op::LoadT, 0.0});
        } else if constexpr (std::is_same_v<T, Negate>) {
          emit(*n.operand);
          code_.push_back({Op::Neg, 0.0});
        } else if constexpr (std::is_same_v<T, Binary>) {
          emit(*n.lhs);
          emit(*n.rhs);
          static constexpr std::array<Op, 5> ops{Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow};
          code_.push_back({ops[static_cast<std::size_t>(n.op)], 0.0});
        } else {
          for (const auto& a : n.args) emit(*a);
          static constexpr std::array<Op, 7> ops{Op::Sin, Op::Cos,  Op::Exp, Op::Log,
                                                 Op::Sqrt, Op::Abs, Op::Pow};
          code_.push_back({ops[static_cast<std::size_t>(n.fn)], 0.0});
        }
      },
      e.node);
}

std::optional<double> Program::run(double t, double x) const {
  // small fixed buffer covers every realistic expression
  std::array<double, 64> small{};
  std::vector<double> big;
  double* stack = small.data();
  if (max_stack_ > small.size()) {
    big.resize(max_stack_);
    stack = big.data();
  }
  std::size_t sp = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push: stack[sp++] = ins.value; continue;
      case Op::LoadT: stack[sp++] = t; continue;
      case Op::LoadX: stack[sp++] = x; continue;
      case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::Add: --sp; stack[sp - 1] = stack[sp - 1] + stack[sp]; break;
      case Op::Sub: --sp; stack[sp - 1] = stack[sp - 1] - stack[sp]; break;
      case Op::Mul: --sp; stack[sp - 1] = stack[sp - 1] * stack[sp]; break;
      case Op::Div: {
        --sp;
        auto v = semantics::divide(stack[sp - 1], stack[sp]);
        if (!v) return std::nullopt;
        stack[sp - 1] = *v;
        break;
      }
      case Op::Pow: {
        --sp;
        auto v = semantics::power(stack[sp - 1], stack[sp]);
        if (!v) return std::nullopt;
        stack[sp - 1] = *v;
        break;
      }
      default: {
        static constexpr std::array<Function, 6> fns{Function::Sin,  Function::Cos, Function::Exp,
                                                     Function::Log,  Function::Sqrt, Function::Abs};
        auto v = semantics::apply(fns[static_cast<std::size_t>(ins.op) - static_cast<std::size_t>(Op::Sin)],
                                  stack[sp - 1]);
        if (!v) return std::nullopt;
        stack[sp - 1] = *v;
        break;
      }
    }
    if (!std::isfinite(stack[sp - 1])) return std::nullopt;
  }
  return stack[0];
}

std::optional<double> evaluate(const Expr& e, double t, std::optional<double> x) {
  Program p(e);
  if (p.uses_x() && !x) throw MissingVariable("expression references x but no x was supplied");
  return p.run(t, x.value_or(0.0));
}

ScalarFunction to_function(const ExprPtr& e, std::string label) {
  auto program = std::make_shared<const Program>(*e);
  if (program->uses_x()) throw MissingVariable("a function of t alone cannot reference x");
  if (label.empty()) label = print(*e);
  return ScalarFunction([program](double t) { return program->run(t, 0.0); }, std::move(label));
}

RightSide to_right_side(const ExprPtr& e) {
  auto program = std::make_shared<const Program>(*e);
  return [program](double t, double x) { return program->run(t, x); };
}

}  // namespace confcalc::expr
