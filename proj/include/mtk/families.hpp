#pragma once

// Constructors and validators for the concrete example families of metallic
// matrices: the two-parameter 2x2 family, Clifford-generator structures,
// metallic reflections, triple structures built from (anti)commuting
// product/complex pairs, and (split/bi)quaternion structures.

#include "mtk/structure.hpp"

namespace mtk {

enum class Family2DVariant {
  generic_rs,        // [[r, -(r^2 - a r - b)/s], [s, a - r]]
  generic_st,        // [[a - t, -(t^2 - a t - b)/s], [s, t]]
  triangular_lower,  // [[r, 0], [s, a - r]] with r an eigenvalue
  triangular_upper,  // [[r, s], [0, a - r]] with r an eigenvalue
  diagonal,          // diag(r, a - r) with r an eigenvalue
};

struct Family2DSpec {
  MetallicParams params;
  double r = 0.0;
  double s = 0.0;
  double t = 0.0;  // used by generic_st only
  Family2DVariant variant = Family2DVariant::generic_rs;
};

/// A member of the two-parameter family of 2x2 metallic matrices. Generic
/// variants need s != 0; triangular/diagonal variants need r in
/// {rho, a - rho} (the only values making a triangular matrix metallic).
Mat family_2d(const Family2DSpec& spec);

/// The 2x2 split generators: e1 = diag(1, -1), e2 = [[0, 1], [1, 0]].
Mat clifford_generator(int i);

/// J_i = (a/2) I + (disc/2) e_i. The pair deforms the Clifford relations:
/// J_i J_j + J_j J_i = a (J_i + J_j) - (a^2/2) I for i != j.
Mat clifford_metallic(int i, const MetallicParams& mp);

/// Residual of the deformed anticommutation identity for a pair (J_i, J_j).
double clifford_anticommutation_residual(const Mat& Ji, const Mat& Jj,
                                         const MetallicParams& mp);

/// Reflection-type structure with distinguished axis v != 0:
///   J_v x = rho x - disc * (<x, v>/<v, v>) v,
/// so J_v v = (a - rho) v and J_v w = rho w for w ⟂ v.
Mat metallic_reflection(const Vec& v, const MetallicParams& mp);

/// The four (anti)commuting pair algebras: letters mean
/// a=almost, h=hyperbolic-product (squares +I), p/c=product/complex pairing.
///   ahp:  F^2 = T^2 = +I, F T = T F    -> K = T F squares to +I
///   abpc: F^2 = T^2 = +I, F T = -T F   -> K squares to -I
///   apbc: F^2 = T^2 = -I, F T = T F    -> K squares to +I
///   ahc:  F^2 = T^2 = -I, F T = -T F   -> K squares to -I
enum class TripleKind { ahp, abpc, apbc, ahc };

struct TripleResult {
  Mat J_F, J_T, J_K;          // (a/2) I + (disc/2) * {F, T, K}
  double relation_residual;   // see below
  double classification_residual;  // metallic or complex-metallic polynomial
  bool k_metallic;            // true: J_K metallic; false: complex metallic
};

/// Validates the declared pair algebra, builds the three structures, and
/// checks the product relation
///   disc * J_K = 2 J_T J_F - a J_T - a J_F + (rho^2 - b) I,  K = T∘F,
/// plus the kind's J_K classification (metallic for ahp/apbc, complex
/// metallic for abpc/ahc).
TripleResult triple_structure(const Mat& F, const Mat& T, TripleKind kind,
                              const MetallicParams& mp, double tol = 1e-10);

enum class AlgebraKind {
  clifford_generator_kind,  // squares to +I
  unit_quaternion_vector,   // squares to -I
  split_quaternion_vector,  // squares to +I
};

/// A square matrix tagged with the algebra it is supposed to generate;
/// the factory verifies the square condition.
struct AlgebraElement {
  CMat matrix;
  AlgebraKind kind;
  static AlgebraElement make(CMat matrix, AlgebraKind kind, double tol = 1e-10);
};

enum class QuaternionFlavor { split, biquaternion };

/// Split flavor:       J = (a/2) I + (disc/2) S0        with S0^2 = +I.
/// Biquaternion flavor: J = (a/2) I + (disc/2) i S0     with S0^2 = -I
/// (the scalar i turns the -I square into an effective +I one).
/// Both results satisfy J^2 = a J + b I.
CMat quaternion_metallic(const AlgebraElement& S0, QuaternionFlavor flavor,
                         const MetallicParams& mp, double tol = 1e-10);

/// 4x4 real left-multiplication representations of the quaternion units
/// i, j, k (index 1..3); each squares to -I and they pairwise anticommute.
Mat quaternion_unit(int i);

/// 2x2 real representations of the split-quaternion units i, j, k
/// (index 1..3): i^2 = -I, j^2 = k^2 = +I.
Mat split_quaternion_unit(int i);

}  // namespace mtk
