#pragma once

// Scalar expression DSL over chart coordinates, with forward-mode automatic
// differentiation. Expressions are immutable trees built either by parsing
// text ("x^2/(x^2 + y^2)") or through combinators, and evaluate to plain
// values or to value+gradient pairs.

#include "mtk/numeric.hpp"

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace mtk {

/// Value together with its gradient with respect to all chart coordinates.
/// Arithmetic follows the Leibniz rule exactly (no truncation): this is
/// forward-mode AD with an n-dimensional seed.
struct DualVector {
  double value = 0.0;
  Vec grad;

  static DualVector constant(double v, Eigen::Index n) {
    return {v, Vec::Zero(n)};
  }
  /// Value of coordinate i at a point, seeded so that d(x_i)/d(x_j) = delta_ij.
  static DualVector coordinate(double v, Eigen::Index n, Eigen::Index i) {
    DualVector d{v, Vec::Zero(n)};
    d.grad[i] = 1.0;
    return d;
  }
};

inline DualVector operator+(const DualVector& a, const DualVector& b) {
  return {a.value + b.value, a.grad + b.grad};
}
inline DualVector operator-(const DualVector& a, const DualVector& b) {
  return {a.value - b.value, a.grad - b.grad};
}
inline DualVector operator-(const DualVector& a) { return {-a.value, -a.grad}; }
inline DualVector operator*(const DualVector& a, const DualVector& b) {
  return {a.value * b.value, a.value * b.grad + b.value * a.grad};
}
inline DualVector operator/(const DualVector& a, const DualVector& b) {
  const double q = a.value / b.value;
  return {q, (a.grad - q * b.grad) / b.value};
}
inline DualVector operator*(double s, const DualVector& a) {
  return {s * a.value, s * a.grad};
}

inline DualVector pow(const DualVector& a, double c) {
  const double v = std::pow(a.value, c);
  // d/dx x^c = c x^(c-1); for c == 0 the result is constant 1.
  if (c == 0.0) return {1.0, Vec::Zero(a.grad.size())};
  return {v, c * std::pow(a.value, c - 1.0) * a.grad};
}
inline DualVector sqrt(const DualVector& a) {
  const double v = std::sqrt(a.value);
  return {v, a.grad / (2.0 * v)};
}
inline DualVector sin(const DualVector& a) {
  return {std::sin(a.value), std::cos(a.value) * a.grad};
}
inline DualVector cos(const DualVector& a) {
  return {std::cos(a.value), -std::sin(a.value) * a.grad};
}
inline DualVector exp(const DualVector& a) {
  const double v = std::exp(a.value);
  return {v, v * a.grad};
}
inline DualVector ln(const DualVector& a) {
  return {std::log(a.value), a.grad / a.value};
}

enum class ExprFunc { sqrt_fn, sin_fn, cos_fn, exp_fn, ln_fn };

/// True when `name` is one of the built-in function identifiers
/// (sqrt, sin, cos, exp, ln); such names cannot be chart coordinates.
bool is_function_name(std::string_view name);

struct ExprNode;  // internal representation, defined in expr.cpp

/// Immutable scalar expression over named coordinates. Copy is cheap
/// (shared subtree). There is no default constructor: an Expr always holds
/// a well-formed tree.
class Expr {
 public:
  // --- combinators -------------------------------------------------------
  /// Finite literal. Negative values normalize to the negation of a positive
  /// literal so printing and parsing agree.
  static Expr literal(double value);
  static Expr coordinate(int index, std::string name);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  static Expr div(Expr lhs, Expr rhs);
  /// Negation; collapses double negation.
  static Expr neg(Expr e);
  /// Power with a literal exponent (the grammar has no expression exponents).
  static Expr pow(Expr base, double exponent);
  static Expr call(ExprFunc f, Expr arg);

  // --- evaluation ---------------------------------------------------------
  /// Plain value at a point. Throws DomainError on division by zero, negative
  /// sqrt argument, non-positive ln argument, or a non-finite intermediate;
  /// the message names the offending subexpression.
  double eval(const Vec& point) const;
  /// Value and exact gradient at a point; same domain rules, and a
  /// non-finite derivative (e.g. sqrt at 0) is also a DomainError.
  DualVector eval_dual(const Vec& point) const;

  // --- inspection ---------------------------------------------------------
  /// Canonical text form with minimal parentheses. Round-trips:
  /// parse_expression(e.str(), coords) is structurally equal to e.
  std::string str() const;
  /// Structural equality (same tree shape, payloads, coordinate names).
  bool same_as(const Expr& other) const;

  // convenience arithmetic
  friend Expr operator+(Expr a, Expr b) { return add(std::move(a), std::move(b)); }
  friend Expr operator-(Expr a, Expr b) { return sub(std::move(a), std::move(b)); }
  friend Expr operator*(Expr a, Expr b) { return mul(std::move(a), std::move(b)); }
  friend Expr operator/(Expr a, Expr b) { return div(std::move(a), std::move(b)); }
  friend Expr operator-(Expr a) { return neg(std::move(a)); }
  friend Expr operator*(double s, Expr a) { return mul(literal(s), std::move(a)); }
  friend Expr operator+(Expr a, double s) { return add(std::move(a), literal(s)); }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;

  friend struct ExprAccess;  // implementation backdoor (expr.cpp only)
};

/// Parse an arithmetic expression over the named coordinates.
/// Grammar: + - * / ^ with standard precedence, unary minus, parentheses,
/// decimal literals, and functions sqrt/sin/cos/exp/ln. `^` takes a literal
/// exponent only. Unknown identifiers and malformed syntax throw ParseError
/// with the byte offset of the problem.
Expr parse_expression(std::string_view source,
                      std::span<const std::string> coordinates);

}  // namespace mtk
