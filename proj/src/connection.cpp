#include "mtk/connection.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace mtk {

namespace {

std::size_t flat_index(int n, int k, int i, int j) {
  return (static_cast<std::size_t>(k) * n + i) * n + j;
}

void require_projector_pair(const TensorField11& l, const TensorField11& m,
                            std::span<const Vec> points, double tol) {
  double worst = 0.0;
  for (const Vec& p : points) {
    const Mat L = l.eval(p);
    const Mat M = m.eval(p);
    const Mat I = Mat::Identity(L.rows(), L.cols());
    double r = max_abs(Mat(L * L - L));
    r = std::max(r, max_abs(Mat(M * M - M)));
    r = std::max(r, max_abs(Mat(L * M)));
    r = std::max(r, max_abs(Mat(M * L)));
    r = std::max(r, max_abs(Mat(L + M - I)));
    worst = std::max(worst, r);
  }
  if (!points.empty() && !(worst <= tol)) {
    std::ostringstream os;
    os << "l, m are not complementary projectors (residual " << worst << ")";
    throw PreconditionError(os.str());
  }
}

void require_metallic(const TensorField11& J, const MetallicParams& mp,
                      std::span<const Vec> points, double tol) {
  double worst = 0.0;
  for (const Vec& p : points)
    worst = std::max(worst, metallic_residual(J.eval(p), mp));
  if (!points.empty() && !(worst <= tol)) {
    std::ostringstream os;
    os << "J is not metallic for (a, b) = (" << mp.a << ", " << mp.b
       << ") (residual " << worst << ")";
    throw PreconditionError(os.str());
  }
}

}  // namespace

// --- TensorField12 ------------------------------------------------------------

TensorField12::TensorField12(Chart chart, std::vector<Expr> entries)
    : chart_(std::move(chart)), entries_(std::move(entries)) {
  const int n = chart_.dim();
  if (static_cast<int>(entries_.size()) != n * n * n)
    throw PreconditionError("(1,2) tensor needs dim^3 entries");
}

TensorField12 TensorField12::zero(const Chart& chart) {
  const int n = chart.dim();
  std::vector<Expr> entries;
  entries.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n * n * n; ++k) entries.push_back(Expr::literal(0.0));
  return TensorField12(chart, std::move(entries));
}

const Expr& TensorField12::entry(int k, int i, int j) const {
  const int n = chart_.dim();
  if (k < 0 || k >= n || i < 0 || i >= n || j < 0 || j >= n)
    throw PreconditionError("(1,2) tensor index out of range");
  return entries_[flat_index(n, k, i, j)];
}

Vec TensorField12::contract(const Vec& Xv, const Vec& Yv,
                            const Vec& point) const {
  const int n = chart_.dim();
  Vec out = Vec::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out[k] += entries_[flat_index(n, k, i, j)].eval(point) * Xv[i] * Yv[j];
  return out;
}

// --- ConnectionCoeffs ----------------------------------------------------------

ConnectionCoeffs ConnectionCoeffs::flat(const Chart& chart) {
  const int n = chart.dim();
  return ConnectionCoeffs(
      chart,
      [n](const Vec&) {
        return std::vector<double>(static_cast<std::size_t>(n) * n * n, 0.0);
      },
      /*symmetric=*/true);
}

ConnectionCoeffs ConnectionCoeffs::from_components(const Chart& chart,
                                                   std::vector<Expr> gamma,
                                                   bool symmetric) {
  const int n = chart.dim();
  if (static_cast<int>(gamma.size()) != n * n * n)
    throw PreconditionError("connection coefficients need dim^3 entries");
  auto shared = std::make_shared<const std::vector<Expr>>(std::move(gamma));
  return ConnectionCoeffs(
      chart,
      [shared, n](const Vec& p) {
        std::vector<double> out(static_cast<std::size_t>(n) * n * n);
        for (std::size_t idx = 0; idx < out.size(); ++idx)
          out[idx] = (*shared)[idx].eval(p);
        return out;
      },
      symmetric);
}

ConnectionCoeffs ConnectionCoeffs::from_evaluator(const Chart& chart,
                                                  Evaluator eval,
                                                  bool symmetric) {
  return ConnectionCoeffs(chart, std::move(eval), symmetric);
}

double ConnectionCoeffs::symmetry_residual(std::span<const Vec> points) const {
  const int n = chart_.dim();
  double worst = 0.0;
  for (const Vec& p : points) {
    const auto g = at(p);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          worst = std::max(worst, std::abs(g[flat_index(n, k, i, j)] -
                                           g[flat_index(n, k, j, i)]));
  }
  return worst;
}

Vec covariant_derivative(const ConnectionCoeffs& conn, const VectorField& X,
                         const VectorField& Y, const Vec& point) {
  if (!conn.chart().same_as(X.chart()) || !conn.chart().same_as(Y.chart()))
    throw PreconditionError("covariant derivative: chart mismatch");
  const int n = conn.chart().dim();
  const Vec Xv = X.eval(point);
  const Vec Yv = Y.eval(point);
  Vec out = Y.jacobian(point) * Xv;  // X^j dY^k/dx_j
  const auto gamma = conn.at(point);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        acc += gamma[flat_index(n, k, i, j)] * Xv[i] * Yv[j];
    out[k] += acc;
  }
  return out;
}

Connection to_connection(const ConnectionCoeffs& coeffs) {
  return Connection(coeffs.chart(), ConnectionKind::user,
                    [coeffs](const VectorField& X, const VectorField& Y,
                             const Vec& p) {
                      return covariant_derivative(coeffs, X, Y, p);
                    });
}

Connection flat_connection(const Chart& chart) {
  return Connection(chart, ConnectionKind::flat,
                    [coeffs = ConnectionCoeffs::flat(chart)](
                        const VectorField& X, const VectorField& Y,
                        const Vec& p) {
                      return covariant_derivative(coeffs, X, Y, p);
                    });
}

ConnectionCoeffs levi_civita(const MetricField& g) {
  const Chart chart = g.chart();
  const int n = chart.dim();
  auto eval = [g, n](const Vec& p) {
    const Mat G = g.eval(p);
    Eigen::PartialPivLU<Mat> lu(G);
    const double rcond = lu.rcond();
    const Mat Ginv = lu.inverse();
    // rcond() is unreliable for exactly singular input, so also demand a
    // finite inverse before trusting the factorization
    if (!(rcond > 1e-12) || !Ginv.allFinite()) {
      std::ostringstream os;
      os << "metric is singular or ill-conditioned (rcond estimate " << rcond
         << ") at a sample point";
      throw DomainError(os.str());
    }
    const std::vector<Mat> dg = g.partials(p);  // dg[k](i,j) = d_k g_ij
    std::vector<double> gamma(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l)
            acc += Ginv(k, l) *
                   (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
          gamma[flat_index(n, k, i, j)] = 0.5 * acc;
        }
      }
    }
    return gamma;
  };
  return ConnectionCoeffs::from_evaluator(chart, std::move(eval),
                                          /*symmetric=*/true);
}

Connection schouten(const Connection& base, const TensorField11& l,
                    const TensorField11& m, std::span<const Vec> points,
                    double tol) {
  require_projector_pair(l, m, points, tol);
  return Connection(
      base.chart(), ConnectionKind::schouten,
      [base, l, m](const VectorField& X, const VectorField& Y, const Vec& p) {
        const VectorField lY = l.apply(Y);
        const VectorField mY = m.apply(Y);
        return Vec(l.eval(p) * base(X, lY, p) + m.eval(p) * base(X, mY, p));
      });
}

Connection vranceanu(const Connection& base, const TensorField11& l,
                     const TensorField11& m, std::span<const Vec> points,
                     double tol) {
  require_projector_pair(l, m, points, tol);
  return Connection(
      base.chart(), ConnectionKind::vranceanu,
      [base, l, m](const VectorField& X, const VectorField& Y, const Vec& p) {
        const VectorField lX = l.apply(X);
        const VectorField mX = m.apply(X);
        const VectorField lY = l.apply(Y);
        const VectorField mY = m.apply(Y);
        const Mat L = l.eval(p);
        const Mat M = m.eval(p);
        return Vec(L * base(lX, lY, p) + M * base(mX, mY, p) +
                   L * lie_bracket(mX, lY, p) + M * lie_bracket(lX, mY, p));
      });
}

Connection obata_connection(const Connection& base, const TensorField11& J,
                            const MetallicParams& mp,
                            const std::optional<TensorField12>& Q,
                            std::span<const Vec> points, double tol) {
  require_metallic(J, mp, points, tol);
  const double a = mp.a;
  const double denom = a * a + 4.0 * mp.b;
  const double diag = a * a + 2.0 * mp.b;
  const double disc = mp.disc;
  return Connection(
      base.chart(), ConnectionKind::obata,
      [base, J, Q, a, denom, diag, disc](const VectorField& X,
                                         const VectorField& Y, const Vec& p) {
        const VectorField JY = J.apply(Y);
        const Mat Jp = J.eval(p);
        const Vec t1 = base(X, Y, p);    // nb_X Y
        const Vec t2 = base(X, JY, p);   // nb_X (JY)
        Vec out = (diag * t1 + 2.0 * (Jp * t2) - a * (Jp * t1) - a * t2) / denom;
        if (Q) {
          const int n = static_cast<int>(p.size());
          const Mat Fp = (2.0 * Jp - a * Mat::Identity(n, n)) / disc;
          const Vec Xv = X.eval(p);
          const Vec Yv = Y.eval(p);
          const Vec q1 = Q->contract(Xv, Yv, p);
          const Vec q2 = Fp * Q->contract(Xv, Vec(Fp * Yv), p);
          out += 0.5 * (q1 + q2);
        }
        return out;
      });
}

Vec nabla_J(const Connection& conn, const TensorField11& A,
            const VectorField& X, const VectorField& Y, const Vec& point) {
  const VectorField AY = A.apply(Y);
  return conn(X, AY, point) - A.eval(point) * conn(X, Y, point);
}

Vec delta_J(const Connection& conn, const TensorField11& J,
            const VectorField& X, const VectorField& Y, const Vec& point) {
  const Mat Jp = J.eval(point);
  const VectorField JX = J.apply(X);
  return Jp * conn(X, Y, point) - Jp * conn(Y, X, point) -
         conn(JX, Y, point) + conn(Y, JX, point);
}

Vec nijenhuis_via_connection(const ConnectionCoeffs& conn,
                             const TensorField11& F, const VectorField& X,
                             const VectorField& Y, const Vec& point) {
  if (!conn.symmetric())
    throw PreconditionError(
        "the connection-based Nijenhuis formula needs a symmetric connection");
  const Mat Fp = F.eval(point);
  const VectorField FX = F.apply(X);
  const VectorField FY = F.apply(Y);
  // (nabla_V F)W = nabla_V (FW) - F(nabla_V W), expanded per term.
  const Vec term1 =
      covariant_derivative(conn, FX, FY, point) -
      Fp * covariant_derivative(conn, FX, Y, point);  // (nabla_{FX} F)Y
  const Vec term2 =
      covariant_derivative(conn, FY, FX, point) -
      Fp * covariant_derivative(conn, FY, X, point);  // (nabla_{FY} F)X
  const Vec term3 =
      Fp * (covariant_derivative(conn, X, FY, point) -
            Fp * covariant_derivative(conn, X, Y, point));  // F(nabla_X F)Y
  const Vec term4 =
      Fp * (covariant_derivative(conn, Y, FX, point) -
            Fp * covariant_derivative(conn, Y, X, point));  // F(nabla_Y F)X
  return term1 - term2 - term3 + term4;
}

CheckResult connection_axioms_check(const Connection& conn,
                                    const VectorField& X1,
                                    const VectorField& X2,
                                    const VectorField& Y1,
                                    const VectorField& Y2, const Expr& f,
                                    std::span<const Vec> points, double tol) {
  ResidualTracker tracker;
  for (const Vec& p : points) {
    double r = 0.0;
    // additivity in X and in Y
    r = std::max(r, max_abs(Vec(conn(X1 + X2, Y1, p) - conn(X1, Y1, p) -
                                conn(X2, Y1, p))));
    r = std::max(r, max_abs(Vec(conn(X1, Y1 + Y2, p) - conn(X1, Y1, p) -
                                conn(X1, Y2, p))));
    // Leibniz rule in Y
    const double fv = f.eval(p);
    const double Xf = derive_along(X1, f, p);
    r = std::max(r, max_abs(Vec(conn(X1, Y1.scaled(f), p) - Xf * Y1.eval(p) -
                                fv * conn(X1, Y1, p))));
    // function-linearity in X
    r = std::max(r,
                 max_abs(Vec(conn(X1.scaled(f), Y1, p) - fv * conn(X1, Y1, p))));
    tracker.update(r, p);
  }
  return tracker.result("connection_axioms", tol);
}

CheckResult metric_compatibility_check(const ConnectionCoeffs& conn,
                                       const MetricField& g,
                                       std::span<const Vec> points, double tol) {
  const int n = conn.chart().dim();
  ResidualTracker tracker;
  for (const Vec& p : points) {
    const Mat G = g.eval(p);
    const std::vector<Mat> dg = g.partials(p);
    const auto gamma = conn.at(p);
    double r = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double v = dg[k](i, j);
          for (int l = 0; l < n; ++l)
            v -= gamma[flat_index(n, l, k, i)] * G(l, j) +
                 gamma[flat_index(n, l, k, j)] * G(i, l);
          r = std::max(r, std::abs(v));
        }
      }
    }
    tracker.update(r, p);
  }
  return tracker.result("levi_civita_compat", tol);
}

}  // namespace mtk
