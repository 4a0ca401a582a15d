#include "mtk/chart.hpp"

#include <cctype>
#include <utility>

namespace mtk {

namespace {

bool identifier_shaped(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

void require_same_chart(const Chart& a, const Chart& b, const char* what) {
  if (!a.same_as(b))
    throw PreconditionError(std::string(what) +
                            ": operands live on different charts");
}

void require_point_dim(const Chart& c, const Vec& p) {
  if (p.size() != c.dim())
    throw PreconditionError("point has dimension " + std::to_string(p.size()) +
                            ", chart has dimension " + std::to_string(c.dim()));
}

}  // namespace

// --- Chart -------------------------------------------------------------------

Chart Chart::make(std::vector<std::string> coordinates) {
  if (coordinates.empty())
    throw PreconditionError("chart needs at least one coordinate");
  for (std::size_t i = 0; i < coordinates.size(); ++i) {
    const auto& name = coordinates[i];
    if (!identifier_shaped(name))
      throw PreconditionError("coordinate name '" + name +
                              "' is not identifier-shaped");
    if (is_function_name(name))
      throw PreconditionError("coordinate name '" + name +
                              "' collides with a built-in function");
    for (std::size_t j = i + 1; j < coordinates.size(); ++j)
      if (coordinates[j] == name)
        throw PreconditionError("duplicate coordinate name '" + name + "'");
  }
  return Chart(std::make_shared<const std::vector<std::string>>(
      std::move(coordinates)));
}

Expr Chart::coord(int i) const {
  if (i < 0 || i >= dim())
    throw PreconditionError("coordinate index out of range");
  return Expr::coordinate(i, (*coords_)[i]);
}

Expr Chart::parse(std::string_view source) const {
  return parse_expression(source, *coords_);
}

// --- VectorField ---------------------------------------------------------------

VectorField::VectorField(Chart chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != chart_.dim())
    throw PreconditionError("vector field needs one component per coordinate");
}

VectorField VectorField::frame(const Chart& chart, int i) {
  if (i < 0 || i >= chart.dim())
    throw PreconditionError("frame index out of range");
  std::vector<Expr> comps;
  comps.reserve(chart.dim());
  for (int k = 0; k < chart.dim(); ++k)
    comps.push_back(Expr::literal(k == i ? 1.0 : 0.0));
  return VectorField(chart, std::move(comps));
}

VectorField VectorField::zero(const Chart& chart) {
  std::vector<Expr> comps;
  comps.reserve(chart.dim());
  for (int k = 0; k < chart.dim(); ++k) comps.push_back(Expr::literal(0.0));
  return VectorField(chart, std::move(comps));
}

VectorField VectorField::constant(const Chart& chart, const Vec& value) {
  if (value.size() != chart.dim())
    throw PreconditionError("constant vector has wrong dimension");
  std::vector<Expr> comps;
  comps.reserve(chart.dim());
  for (int k = 0; k < chart.dim(); ++k)
    comps.push_back(Expr::literal(value[k]));
  return VectorField(chart, std::move(comps));
}

Vec VectorField::eval(const Vec& point) const {
  require_point_dim(chart_, point);
  Vec v(chart_.dim());
  for (int i = 0; i < chart_.dim(); ++i) v[i] = components_[i].eval(point);
  return v;
}

Mat VectorField::jacobian(const Vec& point) const {
  require_point_dim(chart_, point);
  const int n = chart_.dim();
  Mat j(n, n);
  for (int i = 0; i < n; ++i) {
    const DualVector d = components_[i].eval_dual(point);
    j.row(i) = d.grad.transpose();
  }
  return j;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart_, b.chart_, "vector field sum");
  std::vector<Expr> comps;
  comps.reserve(a.components_.size());
  for (std::size_t i = 0; i < a.components_.size(); ++i)
    comps.push_back(Expr::add(a.components_[i], b.components_[i]));
  return VectorField(a.chart_, std::move(comps));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_chart(a.chart_, b.chart_, "vector field difference");
  std::vector<Expr> comps;
  comps.reserve(a.components_.size());
  for (std::size_t i = 0; i < a.components_.size(); ++i)
    comps.push_back(Expr::sub(a.components_[i], b.components_[i]));
  return VectorField(a.chart_, std::move(comps));
}

VectorField VectorField::scaled(const Expr& f) const {
  std::vector<Expr> comps;
  comps.reserve(components_.size());
  for (const Expr& c : components_) comps.push_back(Expr::mul(f, c));
  return VectorField(chart_, std::move(comps));
}

// --- TensorField11 -------------------------------------------------------------

TensorField11::TensorField11(Chart chart, std::vector<Expr> entries)
    : chart_(std::move(chart)), entries_(std::move(entries)) {
  const int n = chart_.dim();
  if (static_cast<int>(entries_.size()) != n * n)
    throw PreconditionError("(1,1) tensor needs dim*dim entries");
}

TensorField11 TensorField11::identity(const Chart& chart) {
  return constant(chart, Mat::Identity(chart.dim(), chart.dim()));
}

TensorField11 TensorField11::constant(const Chart& chart, const Mat& value) {
  const int n = chart.dim();
  if (value.rows() != n || value.cols() != n)
    throw PreconditionError("constant tensor has wrong shape");
  std::vector<Expr> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries.push_back(Expr::literal(value(i, j)));
  return TensorField11(chart, std::move(entries));
}

TensorField11 TensorField11::parse(
    const Chart& chart, const std::vector<std::vector<std::string>>& rows) {
  const int n = chart.dim();
  if (static_cast<int>(rows.size()) != n)
    throw PreconditionError("tensor needs dim rows");
  std::vector<Expr> entries;
  entries.reserve(n * n);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n)
      throw PreconditionError("tensor needs dim entries per row");
    for (const auto& src : row) entries.push_back(chart.parse(src));
  }
  return TensorField11(chart, std::move(entries));
}

const Expr& TensorField11::entry(int i, int j) const {
  const int n = chart_.dim();
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw PreconditionError("tensor entry index out of range");
  return entries_[static_cast<std::size_t>(i) * n + j];
}

Mat TensorField11::eval(const Vec& point) const {
  require_point_dim(chart_, point);
  const int n = chart_.dim();
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = entries_[static_cast<std::size_t>(i) * n + j].eval(point);
  return m;
}

VectorField TensorField11::apply(const VectorField& X) const {
  require_same_chart(chart_, X.chart(), "tensor application");
  const int n = chart_.dim();
  std::vector<Expr> comps;
  comps.reserve(n);
  for (int i = 0; i < n; ++i) {
    Expr sum = Expr::mul(entry(i, 0), X.component(0));
    for (int j = 1; j < n; ++j)
      sum = Expr::add(std::move(sum), Expr::mul(entry(i, j), X.component(j)));
    comps.push_back(std::move(sum));
  }
  return VectorField(chart_, std::move(comps));
}

TensorField11 TensorField11::affine(double alpha, double beta) const {
  const int n = chart_.dim();
  std::vector<Expr> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr e = Expr::mul(Expr::literal(alpha), entry(i, j));
      if (i == j) e = Expr::add(std::move(e), Expr::literal(beta));
      entries.push_back(std::move(e));
    }
  }
  return TensorField11(chart_, std::move(entries));
}

// --- MetricField ----------------------------------------------------------------

MetricField::MetricField(Chart chart, std::vector<Expr> entries)
    : chart_(std::move(chart)), entries_(std::move(entries)) {
  const int n = chart_.dim();
  if (static_cast<int>(entries_.size()) != n * n)
    throw PreconditionError("metric needs dim*dim entries");
}

MetricField MetricField::identity(const Chart& chart) {
  const int n = chart.dim();
  std::vector<Expr> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      entries.push_back(Expr::literal(i == j ? 1.0 : 0.0));
  return MetricField(chart, std::move(entries));
}

MetricField MetricField::parse(const Chart& chart,
                               const std::vector<std::vector<std::string>>& rows) {
  const int n = chart.dim();
  if (static_cast<int>(rows.size()) != n)
    throw PreconditionError("metric needs dim rows");
  std::vector<Expr> entries;
  entries.reserve(n * n);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n)
      throw PreconditionError("metric needs dim entries per row");
    for (const auto& src : row) entries.push_back(chart.parse(src));
  }
  return MetricField(chart, std::move(entries));
}

const Expr& MetricField::entry(int i, int j) const {
  const int n = chart_.dim();
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw PreconditionError("metric entry index out of range");
  return entries_[static_cast<std::size_t>(i) * n + j];
}

Mat MetricField::eval(const Vec& point) const {
  require_point_dim(chart_, point);
  const int n = chart_.dim();
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = entries_[static_cast<std::size_t>(i) * n + j].eval(point);
  return m;
}

std::vector<Mat> MetricField::partials(const Vec& point) const {
  require_point_dim(chart_, point);
  const int n = chart_.dim();
  std::vector<Mat> out(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const DualVector d =
          entries_[static_cast<std::size_t>(i) * n + j].eval_dual(point);
      for (int k = 0; k < n; ++k) out[k](i, j) = d.grad[k];
    }
  }
  return out;
}

double MetricField::symmetry_residual(std::span<const Vec> points) const {
  double worst = 0.0;
  for (const Vec& p : points) {
    const Mat g = eval(p);
    worst = std::max(worst, max_abs(Mat(g - g.transpose())));
  }
  return worst;
}

// --- differential operators -------------------------------------------------

Vec lie_bracket(const VectorField& X, const VectorField& Y, const Vec& point) {
  require_same_chart(X.chart(), Y.chart(), "Lie bracket");
  // [X, Y]^i = X^j dY^i/dx_j - Y^j dX^i/dx_j
  return Y.jacobian(point) * X.eval(point) - X.jacobian(point) * Y.eval(point);
}

double derive_along(const VectorField& X, const Expr& f, const Vec& point) {
  const DualVector d = f.eval_dual(point);
  return d.grad.dot(X.eval(point));
}

Vec nijenhuis(const TensorField11& J, const VectorField& X,
              const VectorField& Y, const Vec& point) {
  require_same_chart(J.chart(), X.chart(), "Nijenhuis tensor");
  require_same_chart(J.chart(), Y.chart(), "Nijenhuis tensor");
  const Mat Jp = J.eval(point);
  const VectorField JX = J.apply(X);
  const VectorField JY = J.apply(Y);
  return Jp * (Jp * lie_bracket(X, Y, point)) + lie_bracket(JX, JY, point) -
         Jp * lie_bracket(JX, Y, point) - Jp * lie_bracket(X, JY, point);
}

double nijenhuis_scaling_residual(const TensorField11& J, double a, double b,
                                  const VectorField& X, const VectorField& Y,
                                  const Vec& point) {
  const double disc_sq = a * a + 4.0 * b;
  if (disc_sq <= 0.0)
    throw PreconditionError("a^2 + 4b must be positive");
  const double disc = std::sqrt(disc_sq);
  const TensorField11 F = J.affine(2.0 / disc, -a / disc);
  const Vec nf = nijenhuis(F, X, Y, point);
  const Vec nj = nijenhuis(J, X, Y, point);
  return max_abs(Vec(nf - (4.0 / disc_sq) * nj));
}

}  // namespace mtk
