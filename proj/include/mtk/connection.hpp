#pragma once

// Linear connections on a chart: coefficient-based connections (flat,
// user-supplied, Levi-Civita), derived evaluator-based connections
// (Schouten, Vrănceanu, Obata family), covariant derivatives of vector and
// (1,1)-tensor fields, the half-parallelism operator, and a connection-based
// Nijenhuis formula.

#include "mtk/structure.hpp"

#include <functional>
#include <optional>

namespace mtk {

/// A (1,2)-tensor field: Q(X, Y)^k = Q^k_ij X^i Y^j with expression entries.
/// Only pointwise values are ever needed (it enters connections as a
/// difference tensor), so no derivative API.
class TensorField12 {
 public:
  /// entries laid out [k][i][j], flattened k*n*n + i*n + j.
  TensorField12(Chart chart, std::vector<Expr> entries);
  static TensorField12 zero(const Chart& chart);

  const Chart& chart() const { return chart_; }
  const Expr& entry(int k, int i, int j) const;
  /// Q(X, Y) at a point given the argument values there.
  Vec contract(const Vec& Xv, const Vec& Yv, const Vec& point) const;

 private:
  Chart chart_;
  std::vector<Expr> entries_;
};

/// Coefficient form of a connection: Gamma^k_ij such that
/// (nabla_X Y)^k = X^j dY^k/dx_j + Gamma^k_ij X^i Y^j.
/// Coefficients are produced by a pointwise evaluator, which covers both
/// expression-given coefficients and computed ones (Levi-Civita's pointwise
/// metric solve has no closed expression form in this DSL).
class ConnectionCoeffs {
 public:
  using Evaluator = std::function<std::vector<double>(const Vec&)>;

  static ConnectionCoeffs flat(const Chart& chart);
  /// gamma laid out [k][i][j] like TensorField12. `symmetric` is the
  /// caller's claim (verify with symmetry_residual).
  static ConnectionCoeffs from_components(const Chart& chart,
                                          std::vector<Expr> gamma,
                                          bool symmetric = false);
  static ConnectionCoeffs from_evaluator(const Chart& chart, Evaluator eval,
                                         bool symmetric);

  const Chart& chart() const { return chart_; }
  bool symmetric() const { return symmetric_; }
  /// Gamma values at a point, layout [k][i][j] flattened.
  std::vector<double> at(const Vec& point) const { return eval_(point); }
  /// Max |Gamma^k_ij - Gamma^k_ji| over the points.
  double symmetry_residual(std::span<const Vec> points) const;

 private:
  ConnectionCoeffs(Chart chart, Evaluator eval, bool symmetric)
      : chart_(std::move(chart)), eval_(std::move(eval)), symmetric_(symmetric) {}
  Chart chart_;
  Evaluator eval_;
  bool symmetric_;
};

/// (nabla_X Y)(p) from coefficients.
Vec covariant_derivative(const ConnectionCoeffs& conn, const VectorField& X,
                         const VectorField& Y, const Vec& point);

enum class ConnectionKind { user, flat, levi_civita, schouten, vranceanu, obata };

/// Evaluator form of a connection: anything that maps two vector fields and
/// a point to (nabla_X Y)(p). Derived connections (Schouten, Vrănceanu,
/// Obata) live here because closed-form coefficient extraction would bury
/// the defining formulas.
class Connection {
 public:
  using Evaluator =
      std::function<Vec(const VectorField&, const VectorField&, const Vec&)>;
  Connection(Chart chart, ConnectionKind kind, Evaluator eval)
      : chart_(std::move(chart)), kind_(kind), eval_(std::move(eval)) {}

  const Chart& chart() const { return chart_; }
  ConnectionKind kind() const { return kind_; }
  Vec operator()(const VectorField& X, const VectorField& Y,
                 const Vec& point) const {
    return eval_(X, Y, point);
  }

 private:
  Chart chart_;
  ConnectionKind kind_;
  Evaluator eval_;
};

Connection to_connection(const ConnectionCoeffs& coeffs);

/// Canonical flat connection of a chart: all coefficients zero, so the
/// covariant derivative is the componentwise directional derivative.
Connection flat_connection(const Chart& chart);

/// Christoffel coefficients of a metric: Gamma^k_ij = (1/2) g^kl
/// (d_i g_jl + d_j g_il - d_l g_ij), solved pointwise. Throws DomainError at
/// points where the metric is singular or ill-conditioned (reciprocal
/// condition estimate in the message).
ConnectionCoeffs levi_civita(const MetricField& g);

/// nabla~_X Y = l(nabla_X lY) + m(nabla_X mY). The pair (l, m) must satisfy
/// the complementary projector identities at the given points.
Connection schouten(const Connection& base, const TensorField11& l,
                    const TensorField11& m, std::span<const Vec> points,
                    double tol);

/// nabla^_X Y = l(nabla_{lX} lY) + m(nabla_{mX} mY) + l[mX, lY] + m[lX, mY].
Connection vranceanu(const Connection& base, const TensorField11& l,
                     const TensorField11& m, std::span<const Vec> points,
                     double tol);

/// The connection family with nabla J = 0:
///   nabla_X Y = (1/(a^2+4b)) [ (a^2+2b) nb_X Y + 2 J(nb_X JY)
///                              - a J(nb_X Y) - a nb_X JY ] + O_F Q(X, Y),
/// where nb is the base connection, F = (2J - aI)/disc, and
/// O_F Q(X, Y) = (1/2)[Q(X, Y) + F Q(X, F Y)] for any (1,2)-tensor Q
/// (omit Q for the canonical member). J must be metallic at the points.
Connection obata_connection(const Connection& base, const TensorField11& J,
                            const MetallicParams& mp,
                            const std::optional<TensorField12>& Q,
                            std::span<const Vec> points, double tol);

/// (nabla_X A)(Y) = nabla_X (A Y) - A(nabla_X Y) for a (1,1) field A
/// (parallelism checks pass J, l, or m here).
Vec nabla_J(const Connection& conn, const TensorField11& A,
            const VectorField& X, const VectorField& Y, const Vec& point);

/// The half-parallelism operator
///   (Delta J)(X, Y) = J nabla_X Y - J nabla_Y X - nabla_{JX} Y + nabla_Y (JX).
Vec delta_J(const Connection& conn, const TensorField11& J,
            const VectorField& X, const VectorField& Y, const Vec& point);

/// Nijenhuis tensor through a symmetric connection:
///   N_F(X,Y) = (nabla_{FX} F)Y - (nabla_{FY} F)X - F(nabla_X F)Y + F(nabla_Y F)X.
/// Agrees with the bracket-based formula; rejects asymmetric coefficients.
Vec nijenhuis_via_connection(const ConnectionCoeffs& conn,
                             const TensorField11& F, const VectorField& X,
                             const VectorField& Y, const Vec& point);

/// Numerical verification that an evaluator behaves like a connection:
/// additivity in both slots, the Leibniz rule nabla_X (fY) = (Xf) Y +
/// f nabla_X Y, and function-linearity nabla_{fX} Y = f nabla_X Y, with the
/// given probe fields and scalar f.
CheckResult connection_axioms_check(const Connection& conn,
                                    const VectorField& X1,
                                    const VectorField& X2,
                                    const VectorField& Y1,
                                    const VectorField& Y2, const Expr& f,
                                    std::span<const Vec> points, double tol);

/// Max residual of nabla g = 0: d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il.
CheckResult metric_compatibility_check(const ConnectionCoeffs& conn,
                                       const MetricField& g,
                                       std::span<const Vec> points, double tol);

}  // namespace mtk
