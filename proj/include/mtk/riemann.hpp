#pragma once

// Checks for metallic (semi-)Riemannian structures (g, J): g-symmetry of
// endomorphisms, equivalence of the F- and J-symmetry statements,
// orthogonality of the eigendistributions, N_J-symmetry, and the
// locally-product condition with its integrability consequence.

#include "mtk/connection.hpp"

namespace mtk {

/// Max over points of ||G A - A^T G|| (the matrix form of
/// g(A e_i, e_j) = g(e_i, A e_j) over all frame pairs).
CheckResult g_symmetry_check(const MetricField& g, const TensorField11& A,
                             std::span<const Vec> points, double tol);

/// Pointwise residual used by g_symmetry_check.
double g_symmetry_residual(const MetricField& g, const TensorField11& A,
                           const Vec& point);

/// A metallic J is g-symmetric iff its almost product F = (2J - aI)/disc is:
/// the two residuals are proportional (factor 2/disc), so the verdicts always
/// agree. Returns both check results; pass means the verdicts agree.
struct SymmetryEquivalence {
  CheckResult j_symmetry;
  CheckResult f_symmetry;
  bool verdicts_agree = false;
};
SymmetryEquivalence equivalence_F_J_symmetry(const MetricField& g,
                                             const TensorField11& J,
                                             const MetallicParams& mp,
                                             std::span<const Vec> points,
                                             double tol);

/// Max over points and frame pairs of |g(l e_i, m e_j)| = ||L^T G M||:
/// the eigendistributions are g-orthogonal when this vanishes.
CheckResult orthogonality_check(const MetricField& g, const TensorField11& l,
                                const TensorField11& m,
                                std::span<const Vec> points, double tol);

/// Residual of N_J(J X, Y) = N_J(X, J Y) at a point.
double nj_symmetry_residual(const TensorField11& J, const VectorField& X,
                            const VectorField& Y, const Vec& point);

/// The same residual tracked over points for one field pair.
CheckResult nj_symmetry_check(const TensorField11& J, const VectorField& X,
                              const VectorField& Y,
                              std::span<const Vec> points, double tol);

/// Computes the Levi-Civita connection of g and reports the max residual of
/// (nabla^g F) over frame pairs, F = (2J - aI)/disc. Pass requires both
/// nabla^g F = 0 and (the consequence) N_J = 0 at the points; when F is not
/// parallel the note records whether J is integrable anyway — the
/// implication only runs one way.
CheckResult locally_product_check(const MetricField& g, const TensorField11& J,
                                  const MetallicParams& mp,
                                  std::span<const Vec> points, double tol);

}  // namespace mtk
