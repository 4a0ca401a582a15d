#include "mtk/sampling.hpp"

#include <cmath>

namespace mtk {

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - unit();
  const double u2 = unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::vector<Vec> sample_points(const SamplingPlan& plan) {
  const int dim = static_cast<int>(plan.box.size());
  if (dim < 1) throw PreconditionError("sampling box needs at least one interval");
  if (plan.count < 1) throw PreconditionError("sample count must be >= 1");
  for (const auto& interval : plan.box)
    if (!std::isfinite(interval[0]) || !std::isfinite(interval[1]) ||
        !(interval[0] <= interval[1]))
      throw PreconditionError("sampling box bounds must be finite and ordered");

  Rng rng(plan.seed);
  std::vector<Vec> points;
  points.reserve(plan.count);
  const long cap = static_cast<long>(plan.count) * 100;
  long draws = 0;
  while (static_cast<int>(points.size()) < plan.count) {
    if (draws >= cap)
      throw Error("sampling retry cap exceeded: exclusion region rejects "
                  "nearly every candidate point");
    ++draws;
    Vec p(dim);
    for (int i = 0; i < dim; ++i)
      p[i] = rng.uniform(plan.box[i][0], plan.box[i][1]);
    if (plan.exclude) {
      bool excluded;
      try {
        excluded = plan.exclude->eval(p) > 0.0;
      } catch (const Error&) {
        excluded = true;  // unevaluable points are unusable anyway
      }
      if (excluded) continue;
    }
    points.push_back(std::move(p));
  }
  return points;
}

Expr random_polynomial(Rng& rng, const Chart& chart) {
  const int n = chart.dim();
  Expr e = Expr::literal(rng.uniform(-1.0, 1.0));
  for (int i = 0; i < n; ++i)
    e = e + Expr::mul(Expr::literal(rng.uniform(-1.0, 1.0)), chart.coord(i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      e = e + Expr::mul(Expr::literal(rng.uniform(-1.0, 1.0)),
                        Expr::mul(chart.coord(i), chart.coord(j)));
  return e;
}

VectorField random_polynomial_field(Rng& rng, const Chart& chart) {
  std::vector<Expr> comps;
  comps.reserve(chart.dim());
  for (int i = 0; i < chart.dim(); ++i)
    comps.push_back(random_polynomial(rng, chart));
  return VectorField(chart, std::move(comps));
}

TensorField11 random_polynomial_tensor(Rng& rng, const Chart& chart) {
  const int n = chart.dim();
  std::vector<Expr> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) entries.push_back(random_polynomial(rng, chart));
  return TensorField11(chart, std::move(entries));
}

Mat random_orthogonal(Rng& rng, int n) {
  if (n < 1) throw PreconditionError("orthogonal matrix size must be >= 1");
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

}  // namespace mtk
