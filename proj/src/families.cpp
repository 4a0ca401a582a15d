#include "mtk/families.hpp"

#include <cmath>
#include <string>

namespace mtk {

namespace {

bool is_eigenvalue(double r, const MetallicParams& mp, double tol = 1e-9) {
  return std::abs(r - mp.rho) <= tol || std::abs(r - mp.conjugate_root()) <= tol;
}

void require_square_sign(const Mat& M, double sign, double tol,
                         const char* name) {
  const Mat I = Mat::Identity(M.rows(), M.cols());
  const double r = max_abs(Mat(M * M - sign * I));
  if (!(r <= tol))
    throw PreconditionError(std::string(name) + "^2 != " +
                            (sign > 0 ? "I" : "-I") + " (residual " +
                            std::to_string(r) + ")");
}

void require_pair_sign(const Mat& F, const Mat& T, double sign, double tol) {
  const double r = max_abs(Mat(F * T - sign * (T * F)));
  if (!(r <= tol))
    throw PreconditionError(std::string("F and T do not ") +
                            (sign > 0 ? "commute" : "anticommute") +
                            " (residual " + std::to_string(r) + ")");
}

}  // namespace

Mat family_2d(const Family2DSpec& spec) {
  const MetallicParams& mp = spec.params;
  Mat J(2, 2);
  switch (spec.variant) {
    case Family2DVariant::generic_rs: {
      if (spec.s == 0.0)
        throw PreconditionError(
            "generic family needs s != 0; use the triangular or diagonal "
            "variant for s = 0");
      const double r = spec.r;
      J << r, -(r * r - mp.a * r - mp.b) / spec.s, spec.s, mp.a - r;
      return J;
    }
    case Family2DVariant::generic_st: {
      if (spec.s == 0.0)
        throw PreconditionError(
            "generic family needs s != 0; use the triangular or diagonal "
            "variant for s = 0");
      const double t = spec.t;
      J << mp.a - t, -(t * t - mp.a * t - mp.b) / spec.s, spec.s, t;
      return J;
    }
    case Family2DVariant::triangular_lower: {
      if (!is_eigenvalue(spec.r, mp))
        throw PreconditionError(
            "triangular members need r in {rho, a - rho}");
      J << spec.r, 0.0, spec.s, mp.a - spec.r;
      return J;
    }
    case Family2DVariant::triangular_upper: {
      if (!is_eigenvalue(spec.r, mp))
        throw PreconditionError(
            "triangular members need r in {rho, a - rho}");
      J << spec.r, spec.s, 0.0, mp.a - spec.r;
      return J;
    }
    case Family2DVariant::diagonal: {
      if (spec.s != 0.0)
        throw PreconditionError("diagonal members need s = 0");
      if (!is_eigenvalue(spec.r, mp))
        throw PreconditionError("diagonal members need r in {rho, a - rho}");
      J << spec.r, 0.0, 0.0, mp.a - spec.r;
      return J;
    }
  }
  throw Error("unknown family variant");
}

Mat clifford_generator(int i) {
  Mat e(2, 2);
  switch (i) {
    case 1:
      e << 1, 0, 0, -1;
      return e;
    case 2:
      e << 0, 1, 1, 0;
      return e;
    default:
      throw PreconditionError("generator index must be 1 or 2");
  }
}

Mat clifford_metallic(int i, const MetallicParams& mp) {
  const Mat e = clifford_generator(i);
  return 0.5 * mp.a * Mat::Identity(2, 2) + 0.5 * mp.disc * e;
}

double clifford_anticommutation_residual(const Mat& Ji, const Mat& Jj,
                                         const MetallicParams& mp) {
  const Mat I = Mat::Identity(Ji.rows(), Ji.cols());
  return max_abs(
      Mat(Ji * Jj + Jj * Ji - mp.a * (Ji + Jj) + 0.5 * mp.a * mp.a * I));
}

Mat metallic_reflection(const Vec& v, const MetallicParams& mp) {
  const double vv = v.squaredNorm();
  if (vv == 0.0) throw PreconditionError("reflection axis must be nonzero");
  const auto n = v.size();
  return mp.rho * Mat::Identity(n, n) - (mp.disc / vv) * (v * v.transpose());
}

TripleResult triple_structure(const Mat& F, const Mat& T, TripleKind kind,
                              const MetallicParams& mp, double tol) {
  if (F.rows() != F.cols() || T.rows() != T.cols() || F.rows() != T.rows())
    throw PreconditionError("F and T must be square matrices of equal size");

  double square_sign = 0.0, pair_sign = 0.0;
  bool k_metallic = false;
  switch (kind) {
    case TripleKind::ahp:
      square_sign = 1.0, pair_sign = 1.0, k_metallic = true;
      break;
    case TripleKind::abpc:
      square_sign = 1.0, pair_sign = -1.0, k_metallic = false;
      break;
    case TripleKind::apbc:
      square_sign = -1.0, pair_sign = 1.0, k_metallic = true;
      break;
    case TripleKind::ahc:
      square_sign = -1.0, pair_sign = -1.0, k_metallic = false;
      break;
  }
  require_square_sign(F, square_sign, tol, "F");
  require_square_sign(T, square_sign, tol, "T");
  require_pair_sign(F, T, pair_sign, tol);

  const auto n = F.rows();
  const Mat I = Mat::Identity(n, n);
  const Mat K = T * F;  // K = T∘F

  TripleResult out;
  out.k_metallic = k_metallic;
  out.J_F = 0.5 * mp.a * I + 0.5 * mp.disc * F;
  out.J_T = 0.5 * mp.a * I + 0.5 * mp.disc * T;
  out.J_K = 0.5 * mp.a * I + 0.5 * mp.disc * K;

  const Mat rhs = 2.0 * out.J_T * out.J_F - mp.a * out.J_T - mp.a * out.J_F +
                  (mp.rho * mp.rho - mp.b) * I;
  out.relation_residual = max_abs(Mat(mp.disc * out.J_K - rhs));
  out.classification_residual =
      k_metallic ? metallic_residual(out.J_K, mp)
                 : complex_metallic_residual(out.J_K.cast<std::complex<double>>(), mp);
  return out;
}

AlgebraElement AlgebraElement::make(CMat matrix, AlgebraKind kind, double tol) {
  if (matrix.rows() != matrix.cols())
    throw PreconditionError("algebra element must be square");
  const CMat I = CMat::Identity(matrix.rows(), matrix.cols());
  const double sign =
      kind == AlgebraKind::unit_quaternion_vector ? -1.0 : 1.0;
  const double r = max_abs(CMat(matrix * matrix - sign * I));
  if (!(r <= tol))
    throw PreconditionError(std::string("element does not square to ") +
                            (sign > 0 ? "I" : "-I") + " (residual " +
                            std::to_string(r) + ")");
  return {std::move(matrix), kind};
}

CMat quaternion_metallic(const AlgebraElement& S0, QuaternionFlavor flavor,
                         const MetallicParams& mp, double tol) {
  const CMat& S = S0.matrix;
  const CMat I = CMat::Identity(S.rows(), S.cols());
  if (flavor == QuaternionFlavor::split) {
    const double r = max_abs(CMat(S * S - I));
    if (!(r <= tol))
      throw PreconditionError("split flavor needs S0^2 = I (residual " +
                              std::to_string(r) + ")");
    return 0.5 * mp.a * I + 0.5 * mp.disc * S;
  }
  const double r = max_abs(CMat(S * S + I));
  if (!(r <= tol))
    throw PreconditionError("biquaternion flavor needs S0^2 = -I (residual " +
                            std::to_string(r) + ")");
  const std::complex<double> unit(0.0, 1.0);
  return 0.5 * mp.a * I + (0.5 * mp.disc * unit) * S;
}

Mat quaternion_unit(int i) {
  Mat m = Mat::Zero(4, 4);
  switch (i) {
    case 1:  // left multiplication by i on (1, i, j, k) coordinates
      m << 0, -1, 0, 0,
           1, 0, 0, 0,
           0, 0, 0, -1,
           0, 0, 1, 0;
      return m;
    case 2:  // left multiplication by j
      m << 0, 0, -1, 0,
           0, 0, 0, 1,
           1, 0, 0, 0,
           0, -1, 0, 0;
      return m;
    case 3:  // left multiplication by k
      m << 0, 0, 0, -1,
           0, 0, -1, 0,
           0, 1, 0, 0,
           1, 0, 0, 0;
      return m;
    default:
      throw PreconditionError("quaternion unit index must be 1, 2, or 3");
  }
}

Mat split_quaternion_unit(int i) {
  Mat m(2, 2);
  switch (i) {
    case 1:
      m << 0, 1, -1, 0;  // squares to -I
      return m;
    case 2:
      m << 0, 1, 1, 0;  // squares to +I
      return m;
    case 3:
      m << 1, 0, 0, -1;  // squares to +I
      return m;
    default:
      throw PreconditionError("split quaternion unit index must be 1, 2, or 3");
  }
}

}  // namespace mtk
