#include "mtk/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <utility>
#include <vector>

namespace mtk {

enum class ExprKind {
  literal,
  coordinate,
  add,
  sub,
  mul,
  divide,
  negate,
  power,
  call,
};

struct ExprNode {
  ExprKind kind;
  double number = 0.0;  // literal value, or power exponent
  int coord = -1;       // coordinate index
  std::string name;     // coordinate name
  ExprFunc func = ExprFunc::sqrt_fn;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

struct ExprAccess {
  static Expr wrap(std::shared_ptr<const ExprNode> n) { return Expr(std::move(n)); }
  static const ExprNode& node(const Expr& e) { return *e.node_; }
  static std::shared_ptr<const ExprNode> share(const Expr& e) { return e.node_; }
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

const std::array<std::pair<std::string_view, ExprFunc>, 5> kFunctions = {{
    {"sqrt", ExprFunc::sqrt_fn},
    {"sin", ExprFunc::sin_fn},
    {"cos", ExprFunc::cos_fn},
    {"exp", ExprFunc::exp_fn},
    {"ln", ExprFunc::ln_fn},
}};

std::string_view function_name(ExprFunc f) {
  for (const auto& [name, fn] : kFunctions)
    if (fn == f) return name;
  return "?";
}

// Shortest decimal form that round-trips through the parser.
std::string format_double(double v) {
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

// Printer precedence levels; larger binds tighter.
int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprKind::add:
    case ExprKind::sub:
      return 1;
    case ExprKind::mul:
    case ExprKind::divide:
      return 2;
    case ExprKind::negate:
      return 3;
    case ExprKind::power:
      return 4;
    default:
      return 5;
  }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int min_prec, std::string& out) {
  const bool parens = precedence(child) < min_prec;
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprKind::literal:
      out += format_double(n.number);
      return;
    case ExprKind::coordinate:
      out += n.name;
      return;
    case ExprKind::add:
      print_child(*n.lhs, 1, out);
      out += " + ";
      print_child(*n.rhs, 2, out);  // right-assoc chains keep their parens
      return;
    case ExprKind::sub:
      print_child(*n.lhs, 1, out);
      out += " - ";
      print_child(*n.rhs, 2, out);
      return;
    case ExprKind::mul:
      print_child(*n.lhs, 2, out);
      out += '*';
      print_child(*n.rhs, 3, out);
      return;
    case ExprKind::divide:
      print_child(*n.lhs, 2, out);
      out += '/';
      print_child(*n.rhs, 3, out);
      return;
    case ExprKind::negate:
      out += '-';
      print_child(*n.lhs, 3, out);
      return;
    case ExprKind::power:
      print_child(*n.lhs, 5, out);
      out += '^';
      if (n.number < 0) {
        out += '(';
        out += format_double(n.number);
        out += ')';
      } else {
        out += format_double(n.number);
      }
      return;
    case ExprKind::call:
      out += function_name(n.func);
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
  }
}

std::string node_text(const ExprNode& n) {
  std::string s;
  print_node(n, s);
  return s;
}

[[noreturn]] void domain_error(const char* what, const ExprNode& n) {
  throw DomainError(std::string(what) + " in '" + node_text(n) + "'");
}

// --- evaluation -----------------------------------------------------------
//
// One template serves both the plain and the dual path; Ops supplies the
// scalar type and the coordinate/constant injections.

struct ValueOps {
  using Scalar = double;
  const Vec& point;
  Scalar constant(double v) const { return v; }
  Scalar coord(int i, double v) const {
    (void)i;
    return v;
  }
  static double value_of(double s) { return s; }
  static bool finite(double s) { return std::isfinite(s); }
  static double do_pow(double v, double e) { return std::pow(v, e); }
  static double do_sqrt(double v) { return std::sqrt(v); }
  static double do_sin(double v) { return std::sin(v); }
  static double do_cos(double v) { return std::cos(v); }
  static double do_exp(double v) { return std::exp(v); }
  static double do_ln(double v) { return std::log(v); }
};

struct DualOps {
  using Scalar = DualVector;
  const Vec& point;
  Scalar constant(double v) const {
    return DualVector::constant(v, point.size());
  }
  Scalar coord(int i, double v) const {
    return DualVector::coordinate(v, point.size(), i);
  }
  static double value_of(const DualVector& s) { return s.value; }
  static bool finite(const DualVector& s) {
    return std::isfinite(s.value) && s.grad.allFinite();
  }
  static DualVector do_pow(const DualVector& v, double e) { return pow(v, e); }
  static DualVector do_sqrt(const DualVector& v) { return sqrt(v); }
  static DualVector do_sin(const DualVector& v) { return sin(v); }
  static DualVector do_cos(const DualVector& v) { return cos(v); }
  static DualVector do_exp(const DualVector& v) { return exp(v); }
  static DualVector do_ln(const DualVector& v) { return ln(v); }
};

template <class Ops>
typename Ops::Scalar eval_node(const ExprNode& n, const Ops& ops) {
  switch (n.kind) {
    case ExprKind::literal:
      return ops.constant(n.number);
    case ExprKind::coordinate: {
      if (n.coord >= ops.point.size())
        throw PreconditionError("point has dimension " +
                                std::to_string(ops.point.size()) +
                                " but expression uses coordinate '" + n.name +
                                "'");
      return ops.coord(n.coord, ops.point[n.coord]);
    }
    case ExprKind::add: {
      auto r = eval_node(*n.lhs, ops) + eval_node(*n.rhs, ops);
      if (!Ops::finite(r)) domain_error("non-finite result", n);
      return r;
    }
    case ExprKind::sub: {
      auto r = eval_node(*n.lhs, ops) - eval_node(*n.rhs, ops);
      if (!Ops::finite(r)) domain_error("non-finite result", n);
      return r;
    }
    case ExprKind::mul: {
      auto r = eval_node(*n.lhs, ops) * eval_node(*n.rhs, ops);
      if (!Ops::finite(r)) domain_error("non-finite result", n);
      return r;
    }
    case ExprKind::divide: {
      auto den = eval_node(*n.rhs, ops);
      if (Ops::value_of(den) == 0.0) domain_error("division by zero", n);
      auto r = eval_node(*n.lhs, ops) / den;
      if (!Ops::finite(r)) domain_error("non-finite result", n);
      return r;
    }
    case ExprKind::negate:
      return -eval_node(*n.lhs, ops);
    case ExprKind::power: {
      auto base = eval_node(*n.lhs, ops);
      auto r = Ops::do_pow(base, n.number);
      if (!Ops::finite(r)) domain_error("non-finite power", n);
      return r;
    }
    case ExprKind::call: {
      auto arg = eval_node(*n.lhs, ops);
      const double av = Ops::value_of(arg);
      typename Ops::Scalar r = ops.constant(0.0);
      switch (n.func) {
        case ExprFunc::sqrt_fn:
          if (av < 0.0) domain_error("sqrt of negative value", n);
          r = Ops::do_sqrt(arg);
          break;
        case ExprFunc::sin_fn:
          r = Ops::do_sin(arg);
          break;
        case ExprFunc::cos_fn:
          r = Ops::do_cos(arg);
          break;
        case ExprFunc::exp_fn:
          r = Ops::do_exp(arg);
          break;
        case ExprFunc::ln_fn:
          if (av <= 0.0) domain_error("ln of non-positive value", n);
          r = Ops::do_ln(arg);
          break;
      }
      if (!Ops::finite(r)) domain_error("non-finite result", n);
      return r;
    }
  }
  throw Error("corrupt expression node");
}

// --- parser ---------------------------------------------------------------

struct Token {
  enum Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Kind kind;
  std::size_t offset;
  double value = 0.0;  // number payload
  std::string text;    // ident payload
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto n = src.size();
  while (i < n) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++i;
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i < n && src[i] == '.') {
        ++i;
        if (i >= n || !std::isdigit(static_cast<unsigned char>(src[i])))
          throw ParseError(start, "malformed number");
        while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      }
      if (i < n && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      double v = 0.0;
      auto [p, ec] = std::from_chars(src.data() + start, src.data() + i, v);
      if (ec != std::errc{} || p != src.data() + i)
        throw ParseError(start, "malformed number");
      out.push_back({Token::number, start, v, {}});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      ++i;
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                       src[i] == '_'))
        ++i;
      out.push_back({Token::ident, start, 0.0,
                     std::string(src.substr(start, i - start))});
      continue;
    }
    Token::Kind k;
    switch (c) {
      case '+': k = Token::plus; break;
      case '-': k = Token::minus; break;
      case '*': k = Token::star; break;
      case '/': k = Token::slash; break;
      case '^': k = Token::caret; break;
      case '(': k = Token::lparen; break;
      case ')': k = Token::rparen; break;
      default:
        throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
    out.push_back({k, start, 0.0, {}});
    ++i;
  }
  out.push_back({Token::end, n, 0.0, {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> coords)
      : tokens_(lex(src)), coords_(coords) {}

  Expr run() {
    Expr e = expression();
    expect(Token::end, "unexpected trailing input");
    return e;
  }

 private:
  std::vector<Token> tokens_;
  std::span<const std::string> coords_;
  std::size_t pos_ = 0;

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }
  bool accept(Token::Kind k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(Token::Kind k, const char* message) {
    if (!accept(k)) throw ParseError(peek().offset, message);
  }

  Expr expression() {
    Expr e = term();
    while (true) {
      if (accept(Token::plus))
        e = Expr::add(std::move(e), term());
      else if (accept(Token::minus))
        e = Expr::sub(std::move(e), term());
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    while (true) {
      if (accept(Token::star))
        e = Expr::mul(std::move(e), unary());
      else if (accept(Token::slash))
        e = Expr::div(std::move(e), unary());
      else
        return e;
    }
  }

  Expr unary() {
    if (accept(Token::minus)) return Expr::neg(unary());
    return power();
  }

  Expr power() {
    Expr e = atom();
    while (accept(Token::caret))
      e = Expr::pow(std::move(e), exponent());
    return e;
  }

  double exponent() {
    if (accept(Token::lparen)) {
      double v = exponent();
      expect(Token::rparen, "expected ')' after exponent");
      return v;
    }
    if (accept(Token::minus)) return -exponent();
    const Token& t = peek();
    if (t.kind != Token::number)
      throw ParseError(t.offset, "exponent must be a numeric literal");
    next();
    return t.value;
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::number:
        next();
        return Expr::literal(t.value);
      case Token::lparen: {
        next();
        Expr e = expression();
        expect(Token::rparen, "expected ')'");
        return e;
      }
      case Token::ident: {
        next();
        for (const auto& [name, fn] : kFunctions) {
          if (t.text == name) {
            expect(Token::lparen, "expected '(' after function name");
            Expr arg = expression();
            expect(Token::rparen, "expected ')'");
            return Expr::call(fn, std::move(arg));
          }
        }
        for (std::size_t i = 0; i < coords_.size(); ++i) {
          if (coords_[i] == t.text)
            return Expr::coordinate(static_cast<int>(i), t.text);
        }
        throw ParseError(t.offset, "unknown identifier '" + t.text + "'");
      }
      default:
        throw ParseError(t.offset, "expected a value");
    }
  }
};

}  // namespace

bool is_function_name(std::string_view name) {
  for (const auto& entry : kFunctions)
    if (name == entry.first) return true;
  return false;
}

// --- combinators ------------------------------------------------------------

Expr Expr::literal(double value) {
  if (!std::isfinite(value))
    throw PreconditionError("literal must be finite");
  if (value < 0.0) return neg(literal(-value));
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::literal;
  n->number = value == 0.0 ? 0.0 : value;  // normalize -0.0
  return ExprAccess::wrap(std::move(n));
}

Expr Expr::coordinate(int index, std::string name) {
  if (index < 0) throw PreconditionError("coordinate index must be >= 0");
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::coordinate;
  n->coord = index;
  n->name = std::move(name);
  return ExprAccess::wrap(std::move(n));
}

namespace {
Expr binary(ExprKind kind, Expr lhs, Expr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = ExprAccess::share(lhs);
  n->rhs = ExprAccess::share(rhs);
  return ExprAccess::wrap(std::move(n));
}
}  // namespace

Expr Expr::add(Expr lhs, Expr rhs) { return binary(ExprKind::add, std::move(lhs), std::move(rhs)); }
Expr Expr::sub(Expr lhs, Expr rhs) { return binary(ExprKind::sub, std::move(lhs), std::move(rhs)); }
Expr Expr::mul(Expr lhs, Expr rhs) { return binary(ExprKind::mul, std::move(lhs), std::move(rhs)); }
Expr Expr::div(Expr lhs, Expr rhs) { return binary(ExprKind::divide, std::move(lhs), std::move(rhs)); }

Expr Expr::neg(Expr e) {
  const ExprNode& c = ExprAccess::node(e);
  if (c.kind == ExprKind::negate) return ExprAccess::wrap(c.lhs);
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::negate;
  n->lhs = ExprAccess::share(e);
  return ExprAccess::wrap(std::move(n));
}

Expr Expr::pow(Expr base, double exponent) {
  if (!std::isfinite(exponent))
    throw PreconditionError("exponent must be finite");
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::power;
  n->number = exponent == 0.0 ? 0.0 : exponent;
  n->lhs = ExprAccess::share(base);
  return ExprAccess::wrap(std::move(n));
}

Expr Expr::call(ExprFunc f, Expr arg) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::call;
  n->func = f;
  n->lhs = ExprAccess::share(arg);
  return ExprAccess::wrap(std::move(n));
}

// --- evaluation / inspection -------------------------------------------------

double Expr::eval(const Vec& point) const {
  return eval_node(*node_, ValueOps{point});
}

DualVector Expr::eval_dual(const Vec& point) const {
  return eval_node(*node_, DualOps{point});
}

std::string Expr::str() const { return node_text(*node_); }

namespace {
bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::literal:
      return a.number == b.number;
    case ExprKind::coordinate:
      return a.coord == b.coord && a.name == b.name;
    case ExprKind::power:
      return a.number == b.number && nodes_equal(*a.lhs, *b.lhs);
    case ExprKind::negate:
      return nodes_equal(*a.lhs, *b.lhs);
    case ExprKind::call:
      return a.func == b.func && nodes_equal(*a.lhs, *b.lhs);
    default:
      return nodes_equal(*a.lhs, *b.lhs) && nodes_equal(*a.rhs, *b.rhs);
  }
}
}  // namespace

bool Expr::same_as(const Expr& other) const {
  return nodes_equal(*node_, *other.node_);
}

Expr parse_expression(std::string_view source,
                      std::span<const std::string> coordinates) {
  Parser p(source, coordinates);
  Expr e = p.run();
  return e;
}

}  // namespace mtk
