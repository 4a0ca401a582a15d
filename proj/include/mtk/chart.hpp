#pragma once

// Coordinate charts and the fields that live on them: vector fields, (1,1)
// tensor fields, and metric fields, all with expression-valued components.
// Derivatives come from the expression module's forward-mode AD, so brackets
// and Nijenhuis tensors are exact up to rounding (no finite differences).

#include "mtk/expr.hpp"

#include <memory>
#include <string>
#include <vector>

namespace mtk {

/// An n-dimensional coordinate chart: an ordered list of coordinate names.
/// Copies are cheap; two charts with the same coordinate list are
/// interchangeable.
class Chart {
 public:
  /// Validates: at least one coordinate, identifier-shaped unique names,
  /// none colliding with a built-in function name.
  static Chart make(std::vector<std::string> coordinates);

  int dim() const { return static_cast<int>(coords_->size()); }
  const std::vector<std::string>& coordinates() const { return *coords_; }
  /// The i-th coordinate as an expression.
  Expr coord(int i) const;
  /// Parse an expression in this chart's coordinates.
  Expr parse(std::string_view source) const;
  bool same_as(const Chart& other) const {
    return coords_ == other.coords_ || *coords_ == *other.coords_;
  }

 private:
  explicit Chart(std::shared_ptr<const std::vector<std::string>> c)
      : coords_(std::move(c)) {}
  std::shared_ptr<const std::vector<std::string>> coords_;
};

/// Contravariant vector field: n expression components over a chart.
class VectorField {
 public:
  VectorField(Chart chart, std::vector<Expr> components);
  /// The coordinate frame field d/dx_i (components are 0/1 literals).
  static VectorField frame(const Chart& chart, int i);
  static VectorField zero(const Chart& chart);
  /// Constant-components field.
  static VectorField constant(const Chart& chart, const Vec& value);

  const Chart& chart() const { return chart_; }
  const Expr& component(int i) const { return components_.at(i); }
  Vec eval(const Vec& point) const;
  /// jacobian(i, j) = d X^i / d x_j at the point.
  Mat jacobian(const Vec& point) const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  /// Multiply every component by the scalar expression f.
  VectorField scaled(const Expr& f) const;

 private:
  Chart chart_;
  std::vector<Expr> components_;
};

/// (1,1) tensor field: an n-by-n matrix of expressions, row-major. Acts on
/// vector fields; entry(i, j) is the i-th component of the image of d/dx_j.
class TensorField11 {
 public:
  TensorField11(Chart chart, std::vector<Expr> entries);
  static TensorField11 identity(const Chart& chart);
  static TensorField11 constant(const Chart& chart, const Mat& value);
  /// Build from a matrix of expression strings (outer = rows).
  static TensorField11 parse(const Chart& chart,
                             const std::vector<std::vector<std::string>>& rows);

  const Chart& chart() const { return chart_; }
  const Expr& entry(int i, int j) const;
  Mat eval(const Vec& point) const;
  /// Symbolic application: (A X)^i = sum_j A^i_j X^j, as a new field whose
  /// components can be differentiated.
  VectorField apply(const VectorField& X) const;
  /// alpha * A + beta * I, entrywise symbolic.
  TensorField11 affine(double alpha, double beta) const;

 private:
  Chart chart_;
  std::vector<Expr> entries_;  // n*n, row-major
};

/// Symmetric (0,2) tensor field (a metric candidate). Symmetry is the
/// caller's claim; verify_symmetric checks it numerically at sample points.
class MetricField {
 public:
  MetricField(Chart chart, std::vector<Expr> entries);
  static MetricField identity(const Chart& chart);
  static MetricField parse(const Chart& chart,
                           const std::vector<std::vector<std::string>>& rows);

  const Chart& chart() const { return chart_; }
  const Expr& entry(int i, int j) const;
  Mat eval(const Vec& point) const;
  /// partials[k](i, j) = d g_ij / d x_k at the point.
  std::vector<Mat> partials(const Vec& point) const;
  /// Max |g_ij - g_ji| over the given points.
  double symmetry_residual(std::span<const Vec> points) const;

 private:
  Chart chart_;
  std::vector<Expr> entries_;
};

/// Lie bracket [X, Y] at a point, via exact jacobians.
Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& point);

/// Directional derivative X(f) at a point.
double derive_along(const VectorField& X, const Expr& f, const Vec& point);

/// Nijenhuis tensor of a (1,1) field at a point:
///   N_J(X, Y) = J^2 [X,Y] + [JX, JY] - J [JX, Y] - J [X, JY].
Vec nijenhuis(const TensorField11& J, const VectorField& X,
              const VectorField& Y, const Vec& point);

/// Residual of the quadratic rescaling law linking the Nijenhuis tensors of
/// a metallic J and its induced almost product structure
/// F = (2 J - a I)/sqrt(a^2 + 4 b):
///   N_F = 4/(a^2 + 4 b) * N_J.
/// Returns the max-norm of the difference at the point.
double nijenhuis_scaling_residual(const TensorField11& J, double a, double b,
                                  const VectorField& X, const VectorField& Y,
                                  const Vec& point);

}  // namespace mtk
