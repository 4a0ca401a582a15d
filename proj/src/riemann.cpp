#include "mtk/riemann.hpp"

namespace mtk {

double g_symmetry_residual(const MetricField& g, const TensorField11& A,
                           const Vec& point) {
  const Mat G = g.eval(point);
  const Mat Ap = A.eval(point);
  return max_abs(Mat(G * Ap - Ap.transpose() * G));
}

CheckResult g_symmetry_check(const MetricField& g, const TensorField11& A,
                             std::span<const Vec> points, double tol) {
  ResidualTracker tracker;
  for (const Vec& p : points) tracker.update(g_symmetry_residual(g, A, p), p);
  return tracker.result("g_symmetry", tol);
}

SymmetryEquivalence equivalence_F_J_symmetry(const MetricField& g,
                                             const TensorField11& J,
                                             const MetallicParams& mp,
                                             std::span<const Vec> points,
                                             double tol) {
  SymmetryEquivalence out{
      g_symmetry_check(g, J, points, tol),
      // F = (2/disc) J - (a/disc) I; identical points, scaled residual
      g_symmetry_check(g, J.affine(2.0 / mp.disc, -mp.a / mp.disc), points,
                       tol * 2.0 / mp.disc),
      false};
  out.f_symmetry.name = "f_symmetry";
  out.verdicts_agree = out.j_symmetry.pass == out.f_symmetry.pass;
  return out;
}

CheckResult orthogonality_check(const MetricField& g, const TensorField11& l,
                                const TensorField11& m,
                                std::span<const Vec> points, double tol) {
  ResidualTracker tracker;
  for (const Vec& p : points) {
    const Mat G = g.eval(p);
    const Mat L = l.eval(p);
    const Mat M = m.eval(p);
    tracker.update(max_abs(Mat(L.transpose() * G * M)), p);
  }
  return tracker.result("orthogonality", tol);
}

double nj_symmetry_residual(const TensorField11& J, const VectorField& X,
                            const VectorField& Y, const Vec& point) {
  const VectorField JX = J.apply(X);
  const VectorField JY = J.apply(Y);
  return max_abs(Vec(nijenhuis(J, JX, Y, point) - nijenhuis(J, X, JY, point)));
}

CheckResult nj_symmetry_check(const TensorField11& J, const VectorField& X,
                              const VectorField& Y,
                              std::span<const Vec> points, double tol) {
  ResidualTracker tracker;
  for (const Vec& p : points)
    tracker.update(nj_symmetry_residual(J, X, Y, p), p);
  return tracker.result("nj_symmetry", tol);
}

CheckResult locally_product_check(const MetricField& g, const TensorField11& J,
                                  const MetallicParams& mp,
                                  std::span<const Vec> points, double tol) {
  const Chart& chart = J.chart();
  const int n = chart.dim();
  const TensorField11 F = J.affine(2.0 / mp.disc, -mp.a / mp.disc);
  const Connection lc = to_connection(levi_civita(g));

  std::vector<VectorField> frames;
  frames.reserve(n);
  for (int i = 0; i < n; ++i) frames.push_back(VectorField::frame(chart, i));

  ResidualTracker parallel;  // nabla^g F
  double nj_worst = 0.0;     // bracket-based N_J over frame pairs
  for (const Vec& p : points) {
    double r = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        r = std::max(r, max_abs(nabla_J(lc, F, frames[i], frames[j], p)));
    parallel.update(r, p);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        nj_worst = std::max(nj_worst,
                            max_abs(nijenhuis(J, frames[i], frames[j], p)));
  }

  CheckResult out = parallel.result("locally_product", tol);
  const bool integrable = nj_worst <= tol;
  if (out.pass) {
    // The corollary's consequence must hold when F is parallel.
    out.pass = integrable;
    out.note = integrable ? "locally product; integrable"
                          : "parallel F but N_J != 0 (numerical inconsistency)";
  } else {
    out.note = integrable ? "not locally product; integrable anyway"
                          : "not locally product";
  }
  return out;
}

}  // namespace mtk
