#include "mtk/structure.hpp"

#include <cmath>
#include <sstream>

namespace mtk {

namespace {

std::string point_text(const Vec& p) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) os << ", ";
    os << p[i];
  }
  os << ")";
  return os.str();
}

// Shared precondition: max residual of an algebraic identity over points,
// rejecting with the worst point when it exceeds tol.
void require_identity(double residual, const Vec& worst, double tol,
                      const char* what) {
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << what << " fails: residual " << residual << " at " << point_text(worst);
    throw PreconditionError(os.str());
  }
}

struct WorstPoint {
  double residual = -1.0;
  Vec point;
  void update(double r, const Vec& p) {
    if (r > residual) {
      residual = r;
      point = p;
    }
  }
};

}  // namespace

double metallic_ratio(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || a != std::floor(a) || b != std::floor(b))
    throw PreconditionError("metallic ratio needs positive integers a, b");
  return 0.5 * (a + std::sqrt(a * a + 4.0 * b));
}

MetallicParams MetallicParams::make(double a, double b) {
  MetallicParams mp;
  mp.a = a;
  mp.b = b;
  mp.rho = metallic_ratio(a, b);  // validates positivity/integrality
  mp.disc = 2.0 * mp.rho - a;
  return mp;
}

MetallicParams MetallicParams::make_real(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw PreconditionError("metallic coefficients must be positive");
  MetallicParams mp;
  mp.a = a;
  mp.b = b;
  mp.rho = 0.5 * (a + std::sqrt(a * a + 4.0 * b));
  mp.disc = 2.0 * mp.rho - a;
  return mp;
}

double metallic_residual(const Mat& J, const MetallicParams& mp) {
  const Mat I = Mat::Identity(J.rows(), J.cols());
  return max_abs(Mat(J * J - mp.a * J - mp.b * I));
}

double metallic_residual(const CMat& J, const MetallicParams& mp) {
  const CMat I = CMat::Identity(J.rows(), J.cols());
  return max_abs(CMat(J * J - mp.a * J - mp.b * I));
}

double complex_metallic_residual(const CMat& J, const MetallicParams& mp) {
  const CMat I = CMat::Identity(J.rows(), J.cols());
  const double c = 0.5 * (mp.a * mp.a + 2.0 * mp.b);
  return max_abs(CMat(J * J - mp.a * J + c * I));
}

double tangent_metallic_residual(const Mat& J, const MetallicParams& mp) {
  const Mat I = Mat::Identity(J.rows(), J.cols());
  const double c = 0.25 * mp.a * mp.a;
  return max_abs(Mat(J * J - mp.a * J + c * I));
}

double annihilating_spectrum_check(const Mat& Jp, const MetallicParams& mp) {
  const Mat I = Mat::Identity(Jp.rows(), Jp.cols());
  return max_abs(Mat((Jp - mp.rho * I) * (Jp - mp.conjugate_root() * I)));
}

CheckResult is_metallic(const TensorField11& J, const MetallicParams& mp,
                        std::span<const Vec> points, double tol) {
  ResidualTracker tracker;
  for (const Vec& p : points) {
    try {
      tracker.update(metallic_residual(J.eval(p), mp), p);
    } catch (const DomainError& e) {
      CheckResult r = tracker.result("metallic", tol);
      r.pass = false;
      r.worst_point = p;
      r.points_evaluated = tracker.count() + 1;
      r.note = e.what();
      return r;
    }
  }
  return tracker.result("metallic", tol);
}

TensorField11 from_product(const TensorField11& F, const MetallicParams& mp,
                           std::span<const Vec> points, double tol) {
  WorstPoint w;
  for (const Vec& p : points) {
    const Mat Fp = F.eval(p);
    w.update(max_abs(Mat(Fp * Fp - Mat::Identity(Fp.rows(), Fp.cols()))), p);
  }
  if (!points.empty())
    require_identity(w.residual, w.point, tol, "almost product condition F^2 = I");
  return F.affine(0.5 * mp.disc, 0.5 * mp.a);
}

TensorField11 to_product(const TensorField11& J, const MetallicParams& mp,
                         std::span<const Vec> points, double tol) {
  WorstPoint w;
  for (const Vec& p : points) w.update(metallic_residual(J.eval(p), mp), p);
  if (!points.empty())
    require_identity(w.residual, w.point, tol, "metallic condition J^2 = aJ + bI");
  return J.affine(2.0 / mp.disc, -mp.a / mp.disc);
}

TensorField11 conjugate(const TensorField11& J, const MetallicParams& mp,
                        std::span<const Vec> points, double tol) {
  WorstPoint w;
  for (const Vec& p : points) w.update(metallic_residual(J.eval(p), mp), p);
  if (!points.empty())
    require_identity(w.residual, w.point, tol, "metallic condition J^2 = aJ + bI");
  return J.affine(-1.0, mp.a);
}

TensorField11 inverse_structure(const TensorField11& J,
                                const MetallicParams& mp,
                                std::span<const Vec> points, double tol) {
  WorstPoint w;
  for (const Vec& p : points) w.update(metallic_residual(J.eval(p), mp), p);
  if (!points.empty())
    require_identity(w.residual, w.point, tol, "metallic condition J^2 = aJ + bI");
  return J.affine(1.0 / mp.b, -mp.a / mp.b);
}

TensorField11 tangent_metallic(const TensorField11& T, const MetallicParams& mp,
                               std::span<const Vec> points, double tol) {
  WorstPoint w;
  for (const Vec& p : points) {
    const Mat Tp = T.eval(p);
    w.update(max_abs(Mat(Tp * Tp)), p);
  }
  if (!points.empty())
    require_identity(w.residual, w.point, tol, "almost tangent condition T^2 = 0");
  return T.affine(0.5 * mp.disc, 0.5 * mp.a);
}

CMat complex_metallic(const CMat& C, const MetallicParams& mp, double tol) {
  const CMat I = CMat::Identity(C.rows(), C.cols());
  const double residual = max_abs(CMat(C * C + I));
  if (!(residual <= tol))
    throw PreconditionError("almost complex condition C^2 = -I fails: residual " +
                            std::to_string(residual));
  return 0.5 * mp.a * I + 0.5 * mp.disc * C;
}

Projectors projectors(const TensorField11& J, const MetallicParams& mp,
                      std::span<const Vec> points, double tol) {
  WorstPoint w;
  for (const Vec& p : points) w.update(metallic_residual(J.eval(p), mp), p);
  if (!points.empty())
    require_identity(w.residual, w.point, tol, "metallic condition J^2 = aJ + bI");
  TensorField11 l = J.affine(1.0 / mp.disc, -mp.conjugate_root() / mp.disc);
  TensorField11 m = J.affine(-1.0 / mp.disc, mp.rho / mp.disc);
  return {std::move(l), std::move(m)};
}

CheckResult projector_identities_check(const TensorField11& J,
                                       const TensorField11& l,
                                       const TensorField11& m,
                                       const MetallicParams& mp,
                                       std::span<const Vec> points, double tol) {
  ResidualTracker tracker;
  for (const Vec& p : points) {
    const Mat L = l.eval(p);
    const Mat M = m.eval(p);
    const Mat Jp = J.eval(p);
    const Mat I = Mat::Identity(L.rows(), L.cols());
    double r = max_abs(Mat(L * L - L));
    r = std::max(r, max_abs(Mat(M * M - M)));
    r = std::max(r, max_abs(Mat(L * M)));
    r = std::max(r, max_abs(Mat(M * L)));
    r = std::max(r, max_abs(Mat(L + M - I)));
    r = std::max(r, max_abs(Mat(Jp * L - mp.rho * L)));
    r = std::max(r, max_abs(Mat(L * Jp - mp.rho * L)));
    r = std::max(r, max_abs(Mat(Jp * M - mp.conjugate_root() * M)));
    r = std::max(r, max_abs(Mat(M * Jp - mp.conjugate_root() * M)));
    tracker.update(r, p);
  }
  return tracker.result("projector_identities", tol);
}

TensorField11 metallic_from_projector(const TensorField11& v,
                                      const MetallicParams& mp,
                                      std::span<const Vec> points, double tol) {
  WorstPoint w;
  for (const Vec& p : points) {
    const Mat V = v.eval(p);
    w.update(max_abs(Mat(V * V - V)), p);
  }
  if (!points.empty())
    require_identity(w.residual, w.point, tol, "idempotency condition v^2 = v");
  return v.affine(-mp.disc, mp.rho);
}

std::vector<double> recurrence_sequence(double a, double b, double g0,
                                        double g1, int count) {
  if (count < 0) throw PreconditionError("count must be non-negative");
  std::vector<double> out;
  out.reserve(count);
  double prev = g0, cur = g1;
  for (int k = 0; k < count; ++k) {
    out.push_back(prev);
    const double next = a * cur + b * prev;
    prev = cur;
    cur = next;
  }
  return out;
}

}  // namespace mtk
