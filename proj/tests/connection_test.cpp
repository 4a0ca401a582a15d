#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mtk/connection.hpp"
#include "mtk/sampling.hpp"

#include <cmath>
#include <vector>

using namespace mtk;

namespace {

Vec pt(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

Vec pt3(double x, double y, double z) {
  Vec p(3);
  p << x, y, z;
  return p;
}

// Golden-ratio structure on the punctured plane whose rho-eigenspace is the
// radial direction: J = rho P + (a - rho)(I - P), P the radial projector.
TensorField11 radial_golden(const Chart& chart) {
  return TensorField11::parse(
      chart,
      {{"(1.6180339887498949*x^2 - 0.6180339887498949*y^2)/(x^2 + y^2)",
        "2.2360679774997896*x*y/(x^2 + y^2)"},
       {"2.2360679774997896*x*y/(x^2 + y^2)",
        "(-0.6180339887498949*x^2 + 1.6180339887498949*y^2)/(x^2 + y^2)"}});
}

const std::vector<Vec> kPts = {pt(0.7, 0.4), pt(1.3, -0.8), pt(2.0, 1.5)};

}  // namespace

TEST_CASE("(1,2) tensor: layout and contraction") {
  const Chart xy = Chart::make({"x", "y"});
  std::vector<Expr> entries(8, Expr::literal(0));
  entries[0] = Expr::literal(1);              // Q^0_00
  entries[4 + 0 * 2 + 1] = xy.parse("x");     // Q^1_01
  const TensorField12 Q(xy, entries);
  CHECK(Q.entry(1, 0, 1).str() == "x");

  Vec X(2), Y(2);
  X << 3, 4;
  Y << 5, 6;
  const Vec out = Q.contract(X, Y, pt(2, 9));
  CHECK(out(0) == 15.0);  // 1 * X^0 * Y^0
  CHECK(out(1) == 36.0);  // x * X^0 * Y^1 = 2*3*6

  CHECK(max_abs(Vec(TensorField12::zero(xy).contract(X, Y, pt(2, 9)))) == 0.0);
  CHECK_THROWS_AS(TensorField12(xy, std::vector<Expr>(7, Expr::literal(0))),
                  PreconditionError);
}

TEST_CASE("flat connection differentiates components") {
  const Chart xy = Chart::make({"x", "y"});
  const ConnectionCoeffs flat = ConnectionCoeffs::flat(xy);
  const VectorField Y(xy, {xy.parse("x^2"), xy.parse("y")});

  const Vec dx = covariant_derivative(flat, VectorField::frame(xy, 0), Y,
                                      pt(3, 1));
  CHECK(dx(0) == 6.0);
  CHECK(dx(1) == 0.0);
  const Vec dy = covariant_derivative(flat, VectorField::frame(xy, 1), Y,
                                      pt(3, 1));
  CHECK(dy(0) == 0.0);
  CHECK(dy(1) == 1.0);

  // evaluator forms agree with the coefficient form
  const Connection conn = to_connection(flat);
  CHECK(conn.kind() == ConnectionKind::user);
  CHECK(max_abs(Vec(conn(VectorField::frame(xy, 0), Y, pt(3, 1)) - dx)) ==
        0.0);
  const Connection canonical = flat_connection(xy);
  CHECK(canonical.kind() == ConnectionKind::flat);
  CHECK(max_abs(Vec(canonical(VectorField::frame(xy, 0), Y, pt(3, 1)) - dx)) ==
        0.0);
}

TEST_CASE("Levi-Civita coefficients of diag(1, x^2)") {
  const Chart xy = Chart::make({"x", "y"});
  const MetricField g = MetricField::parse(xy, {{"1", "0"}, {"0", "x^2"}});
  const ConnectionCoeffs lc = levi_civita(g);
  CHECK(lc.symmetric());

  // nonzero Christoffels: Gamma^x_yy = -x, Gamma^y_xy = Gamma^y_yx = 1/x
  const std::vector<double> gamma = lc.at(pt(2, 0.3));
  REQUIRE(gamma.size() == 8);
  for (std::size_t idx = 0; idx < gamma.size(); ++idx) {
    const double expected =
        idx == 3 ? -2.0 : (idx == 5 || idx == 6) ? 0.5 : 0.0;
    CHECK(gamma[idx] == doctest::Approx(expected).epsilon(1e-13));
  }

  const Vec d = covariant_derivative(lc, VectorField::frame(xy, 0),
                                     VectorField::frame(xy, 1), pt(2, 0.3));
  CHECK(d(0) == doctest::Approx(0.0));
  CHECK(d(1) == doctest::Approx(0.5).epsilon(1e-13));

  const CheckResult compat = metric_compatibility_check(lc, g, kPts, 1e-9);
  CHECK(compat.pass);
  CHECK(compat.max_residual <= 1e-12);

  // singular along x = 0
  CHECK_THROWS_AS(lc.at(pt(0, 1)), DomainError);

  // identity metric reduces to the flat connection
  const ConnectionCoeffs lc_id = levi_civita(MetricField::identity(xy));
  for (double v : lc_id.at(pt(0.4, -1.9))) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("Schouten and Vranceanu parallelize the eigenprojectors") {
  const Chart xy = Chart::make({"x", "y"});
  const MetallicParams golden = MetallicParams::make(1, 1);
  const TensorField11 J = radial_golden(xy);
  const Projectors proj = projectors(J, golden, kPts, 1e-9);

  // the parallelism is base-independent: try a flat base and a curved one
  const Connection flat = to_connection(ConnectionCoeffs::flat(xy));
  const Connection curved = to_connection(
      levi_civita(MetricField::parse(xy, {{"1", "0"}, {"0", "x^2"}})));

  for (const Connection* base : {&flat, &curved}) {
    const Connection sch = schouten(*base, proj.l, proj.m, kPts, 1e-9);
    const Connection vr = vranceanu(*base, proj.l, proj.m, kPts, 1e-9);
    CHECK(sch.kind() == ConnectionKind::schouten);
    CHECK(vr.kind() == ConnectionKind::vranceanu);
    for (const Connection* conn : {&sch, &vr}) {
      double worst = 0.0;
      for (const TensorField11* A : {&proj.l, &proj.m, &J})
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            for (const Vec& p : kPts)
              worst = std::max(
                  worst, max_abs(Vec(nabla_J(*conn, *A,
                                             VectorField::frame(xy, i),
                                             VectorField::frame(xy, j), p))));
      CHECK(worst <= 1e-12);
    }
  }

  // the operators are tensorial, so non-constant probes work too
  Rng rng(11);
  const Connection sch = schouten(flat, proj.l, proj.m, kPts, 1e-9);
  const VectorField X = random_polynomial_field(rng, xy);
  const VectorField Y = random_polynomial_field(rng, xy);
  for (const Vec& p : kPts)
    CHECK(max_abs(Vec(nabla_J(sch, J, X, Y, p))) <= 1e-12);

  // a pair violating the projector identities is rejected
  const TensorField11 I = TensorField11::identity(xy);
  CHECK_THROWS_AS(vranceanu(flat, I, I, kPts, 1e-9), PreconditionError);
  CHECK_THROWS_AS(schouten(flat, proj.l, proj.l, kPts, 1e-9),
                  PreconditionError);
}

TEST_CASE("Obata family: parallel structure, flat reduction, rejection") {
  const Chart xy = Chart::make({"x", "y"});
  const MetallicParams golden = MetallicParams::make(1, 1);
  const TensorField11 J = radial_golden(xy);
  const Connection flat = to_connection(ConnectionCoeffs::flat(xy));

  Rng rng(99);
  std::vector<Expr> q_entries;
  for (int k = 0; k < 8; ++k) q_entries.push_back(random_polynomial(rng, xy));
  const TensorField12 Q(xy, q_entries);

  const Connection obata =
      obata_connection(flat, J, golden, Q, kPts, 1e-9);
  CHECK(obata.kind() == ConnectionKind::obata);
  const VectorField X = random_polynomial_field(rng, xy);
  const VectorField Y = random_polynomial_field(rng, xy);
  double worst = 0.0;
  for (const Vec& p : kPts) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        worst = std::max(
            worst, max_abs(Vec(nabla_J(obata, J, VectorField::frame(xy, i),
                                       VectorField::frame(xy, j), p))));
    worst = std::max(worst, max_abs(Vec(nabla_J(obata, J, X, Y, p))));
  }
  CHECK(worst <= 1e-10);

  // canonical member (Q omitted) with a constant structure is again flat
  const Mat diag = (Mat(2, 2) << golden.rho, 0, 0, golden.conjugate_root())
                       .finished();
  const TensorField11 Jc = TensorField11::constant(xy, diag);
  const Connection reduced =
      obata_connection(flat, Jc, golden, std::nullopt, kPts, 1e-9);
  for (const Vec& p : kPts)
    CHECK(max_abs(Vec(reduced(X, Y, p) - flat(X, Y, p))) <= 1e-13);

  // non-metallic input is rejected
  CHECK_THROWS_AS(obata_connection(flat, TensorField11::identity(xy), golden,
                                   std::nullopt, kPts, 1e-9),
                  PreconditionError);
}

TEST_CASE("half-parallelism operator against a bracket identity") {
  // with a flat symmetric base, Delta J (X, Y) = J [X, Y] - [JX, Y]
  const Chart xy = Chart::make({"x", "y"});
  const Connection flat = to_connection(ConnectionCoeffs::flat(xy));
  const TensorField11 J =
      TensorField11::parse(xy, {{"x", "y"}, {"1", "x*y"}});
  const VectorField X(xy, {xy.parse("y"), xy.parse("x^2")});
  const VectorField Y(xy, {xy.parse("x"), xy.parse("2")});
  const Vec p = pt(1.5, -2.0);

  const Vec lhs = delta_J(flat, J, X, Y, p);
  const Vec rhs = Vec(J.eval(p) * lie_bracket(X, Y, p)) -
                  lie_bracket(J.apply(X), Y, p);
  CHECK(max_abs(Vec(lhs - rhs)) <= 1e-12);
}

TEST_CASE("connection-based Nijenhuis formula") {
  const Chart xyz = Chart::make({"x", "y", "z"});
  const TensorField11 F = TensorField11::parse(
      xyz, {{"1", "0", "0"}, {"0", "1", "0"}, {"0", "2*x", "-1"}});
  const ConnectionCoeffs flat = ConnectionCoeffs::flat(xyz);
  const VectorField dx = VectorField::frame(xyz, 0);
  const VectorField dy = VectorField::frame(xyz, 1);
  const Vec p = pt3(0.3, -1.2, 0.9);

  const Vec nf = nijenhuis_via_connection(flat, F, dx, dy, p);
  CHECK(nf(0) == doctest::Approx(0.0));
  CHECK(nf(1) == doctest::Approx(0.0));
  CHECK(nf(2) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(max_abs(Vec(nf - nijenhuis(F, dx, dy, p))) <= 1e-12);

  // the formula presumes symmetric coefficients
  std::vector<Expr> gamma(27, Expr::literal(0));
  gamma[0 * 9 + 0 * 3 + 1] = Expr::literal(1);  // Gamma^x_xy != Gamma^x_yx
  const ConnectionCoeffs torsional =
      ConnectionCoeffs::from_components(xyz, gamma, false);
  CHECK_THROWS_AS(nijenhuis_via_connection(torsional, F, dx, dy, p),
                  PreconditionError);
}

TEST_CASE("axioms hold for every connection constructor") {
  const Chart xy = Chart::make({"x", "y"});
  Rng rng(5);
  const VectorField X1 = random_polynomial_field(rng, xy);
  const VectorField X2 = random_polynomial_field(rng, xy);
  const VectorField Y1 = random_polynomial_field(rng, xy);
  const VectorField Y2 = random_polynomial_field(rng, xy);
  const Expr f = random_polynomial(rng, xy);

  const MetallicParams golden = MetallicParams::make(1, 1);
  const TensorField11 J = radial_golden(xy);
  const Projectors proj = projectors(J, golden, kPts, 1e-9);
  const Connection flat = to_connection(ConnectionCoeffs::flat(xy));

  const std::vector<Connection> conns = {
      flat,
      to_connection(levi_civita(MetricField::parse(
          xy, {{"1", "0"}, {"0", "x^2"}}))),
      schouten(flat, proj.l, proj.m, kPts, 1e-9),
      vranceanu(flat, proj.l, proj.m, kPts, 1e-9),
      obata_connection(flat, J, golden, std::nullopt, kPts, 1e-9),
  };
  for (const Connection& conn : conns) {
    const CheckResult r =
        connection_axioms_check(conn, X1, X2, Y1, Y2, f, kPts, 1e-9);
    CHECK(r.pass);
    CHECK(r.max_residual <= 1e-10);
  }
}
