#pragma once

// The algebra of metallic structures: tensor fields J with J^2 = a J + b I
// for positive integers a, b. Covers the ratio itself, membership checks,
// conversions to and from almost product structures, conjugates, inverses,
// tangent/complex variants, eigenprojectors, and structure-from-projector.

#include "mtk/chart.hpp"

#include <complex>
#include <span>
#include <utility>

namespace mtk {

/// Positive root of x^2 - a x - b. Rejects non-positive or non-integer
/// arguments (pass params through MetallicParams::make_real to explore real
/// coefficients).
double metallic_ratio(double a, double b);

/// The coefficient pair (a, b) with its derived constants.
struct MetallicParams {
  double a = 1.0;
  double b = 1.0;
  double rho = 0.0;   // (a + sqrt(a^2 + 4b)) / 2
  double disc = 0.0;  // sqrt(a^2 + 4b) = 2 rho - a

  /// a, b must be positive integers.
  static MetallicParams make(double a, double b);
  /// Relaxed variant: any positive reals (exploration mode).
  static MetallicParams make_real(double a, double b);

  /// The second eigenvalue a - rho = -b/rho.
  double conjugate_root() const { return a - rho; }
  /// Double root of the tangent variant's polynomial x^2 - a x + a^2/4.
  double tangent_ratio() const { return 0.5 * a; }
  /// Root a/2 + (disc/2) i of the complex variant's polynomial
  /// x^2 - a x + (a^2 + 2b)/2.
  std::complex<double> complex_ratio() const { return {0.5 * a, 0.5 * disc}; }
};

// --- pointwise residuals on constant matrices --------------------------------

/// Max-norm of J^2 - a J - b I.
double metallic_residual(const Mat& J, const MetallicParams& mp);
double metallic_residual(const CMat& J, const MetallicParams& mp);
/// Max-norm of J^2 - a J + ((a^2 + 2b)/2) I (the complex variant's polynomial).
double complex_metallic_residual(const CMat& J, const MetallicParams& mp);
/// Max-norm of J^2 - a J + (a^2/4) I (the tangent variant's polynomial).
double tangent_metallic_residual(const Mat& J, const MetallicParams& mp);

/// ||(J - rho I)(J - (a - rho) I)||: zero iff the spectrum lies in
/// {rho, a - rho} with trivial nilpotent part. Same matrix as the metallic
/// residual, factored to make the eigenvalue statement explicit.
double annihilating_spectrum_check(const Mat& Jp, const MetallicParams& mp);

// --- field-level operations ---------------------------------------------------

/// Max over points of ||J(p)^2 - a J(p) - b I||; a domain error at a point
/// fails the check with that point recorded.
CheckResult is_metallic(const TensorField11& J, const MetallicParams& mp,
                        std::span<const Vec> points, double tol);

/// J = (a/2) I + ((2 rho - a)/2) F from an almost product structure
/// (F^2 = I verified at the points).
TensorField11 from_product(const TensorField11& F, const MetallicParams& mp,
                           std::span<const Vec> points, double tol);

/// F = (2/(2 rho - a)) J - (a/(2 rho - a)) I; J must be metallic at the
/// points, and the result squares to I there.
TensorField11 to_product(const TensorField11& J, const MetallicParams& mp,
                         std::span<const Vec> points, double tol);

/// The conjugate structure a I - J (swaps the two eigenspaces; an involution).
TensorField11 conjugate(const TensorField11& J, const MetallicParams& mp,
                        std::span<const Vec> points, double tol);

/// The inverse (J - a I)/b, satisfying b J'^2 + a J' - I = 0 and J J' = I.
TensorField11 inverse_structure(const TensorField11& J,
                                const MetallicParams& mp,
                                std::span<const Vec> points, double tol);

/// J_t = (a/2) I + ((2 rho - a)/2) T from an almost tangent structure
/// (T^2 = 0 verified). Note J_t is annihilated by x^2 - a x + a^2/4,
/// not by the metallic polynomial.
TensorField11 tangent_metallic(const TensorField11& T, const MetallicParams& mp,
                               std::span<const Vec> points, double tol);

/// J_c = (a/2) I + ((2 rho - a)/2) C from a constant almost complex matrix
/// (C^2 = -I verified). Constant matrices only; the complex variant has no
/// field form here. Eigenvalues are a/2 +- (disc/2) i.
CMat complex_metallic(const CMat& C, const MetallicParams& mp, double tol);

/// Complementary eigenprojectors of a metallic J:
///   l = (1/disc) J - ((a - rho)/disc) I   (onto the rho-eigendistribution)
///   m = -(1/disc) J + (rho/disc) I        (onto the (a - rho)-one)
/// Verifies l^2 = l, m^2 = m, lm = ml = 0, l + m = I, and the eigen-relations
/// J l = l J = rho l, J m = m J = (a - rho) m at the points.
struct Projectors {
  TensorField11 l;
  TensorField11 m;
};
Projectors projectors(const TensorField11& J, const MetallicParams& mp,
                      std::span<const Vec> points, double tol);

/// Max of the nine projector-identity residuals above at the given points.
/// `tracker` form so callers can report the worst point.
CheckResult projector_identities_check(const TensorField11& J,
                                       const TensorField11& l,
                                       const TensorField11& m,
                                       const MetallicParams& mp,
                                       std::span<const Vec> points, double tol);

/// J = rho I - disc * v from an idempotent field v (v^2 = v verified).
/// ker v becomes the rho-eigenspace and im v the (a - rho)-eigenspace.
TensorField11 metallic_from_projector(const TensorField11& v,
                                      const MetallicParams& mp,
                                      std::span<const Vec> points, double tol);

/// Terms of the recurrence G(k+1) = a G(k) + b G(k-1); successive ratios
/// converge to the metallic ratio. Tiny utility for docs and tests.
std::vector<double> recurrence_sequence(double a, double b, double g0,
                                        double g1, int count);

}  // namespace mtk
