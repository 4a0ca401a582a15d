#include "mtk/scenario.hpp"

#include "mtk/families.hpp"

#include "json.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace mtk {
namespace {

using nlohmann::json;

// --- formatting helpers -------------------------------------------------------

// Canonical number form: 17 significant digits round-trips every double, and
// snprintf's rounding is stable, so reports compare byte-for-byte.
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string fmt_plain(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string point_text(const Vec& p) {
  std::string s;
  for (int i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += fmt_plain(p(i));
  }
  return s;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<int>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// --- loader -------------------------------------------------------------------

[[noreturn]] void load_fail(const std::string& origin, const std::string& msg) {
  throw Error(origin + ": " + msg);
}

double number_field(const json& j, const char* key, const std::string& origin,
                    const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    load_fail(origin, where + " requires a numeric \"" + key + "\"");
  return j.at(key).get<double>();
}

Expr parse_entry(const Chart& chart, const json& cell, const std::string& origin,
                 const std::string& where) {
  if (!cell.is_string())
    load_fail(origin, where + " must be an expression string");
  try {
    return chart.parse(cell.get<std::string>());
  } catch (const ParseError& e) {
    load_fail(origin, where + ": " + e.what());
  }
}

std::vector<Expr> parse_square(const Chart& chart, const json& jm,
                               const std::string& origin,
                               const std::string& field) {
  const int n = chart.dim();
  if (!jm.is_array() || static_cast<int>(jm.size()) != n)
    load_fail(origin, "field \"" + field + "\" must be a " +
                          std::to_string(n) + "x" + std::to_string(n) +
                          " array of expression strings");
  std::vector<Expr> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const json& row = jm.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      load_fail(origin, "field \"" + field + "\" row " + std::to_string(i) +
                            " must have " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j)
      entries.push_back(parse_entry(chart, row.at(j), origin,
                                    "field \"" + field + "\"[" +
                                        std::to_string(i) + "][" +
                                        std::to_string(j) + "]"));
  }
  return entries;
}

std::vector<Expr> parse_cube(const Chart& chart, const json& jm,
                             const std::string& origin,
                             const std::string& field) {
  const int n = chart.dim();
  if (!jm.is_array() || static_cast<int>(jm.size()) != n)
    load_fail(origin, "field \"" + field + "\" must be an array of " +
                          std::to_string(n) + " matrices (layout [k][i][j])");
  std::vector<Expr> entries;
  entries.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    const json& slice = jm.at(k);
    if (!slice.is_array() || static_cast<int>(slice.size()) != n)
      load_fail(origin, "field \"" + field + "\"[" + std::to_string(k) +
                            "] must be a " + std::to_string(n) + "x" +
                            std::to_string(n) + " matrix");
    for (int i = 0; i < n; ++i) {
      const json& row = slice.at(i);
      if (!row.is_array() || static_cast<int>(row.size()) != n)
        load_fail(origin, "field \"" + field + "\"[" + std::to_string(k) +
                              "][" + std::to_string(i) + "] must have " +
                              std::to_string(n) + " entries");
      for (int j = 0; j < n; ++j)
        entries.push_back(parse_entry(
            chart, row.at(j), origin,
            "field \"" + field + "\"[" + std::to_string(k) + "][" +
                std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
  }
  return entries;
}

VectorField parse_vector(const Chart& chart, const json& jv,
                         const std::string& origin, const std::string& field) {
  const int n = chart.dim();
  if (!jv.is_array() || static_cast<int>(jv.size()) != n)
    load_fail(origin, "field \"" + field + "\" must be an array of " +
                          std::to_string(n) + " expression strings");
  std::vector<Expr> comps;
  comps.reserve(n);
  for (int i = 0; i < n; ++i)
    comps.push_back(parse_entry(chart, jv.at(i), origin,
                                "field \"" + field + "\"[" +
                                    std::to_string(i) + "]"));
  return VectorField(chart, std::move(comps));
}

CMat parse_complex_matrix(const Chart& chart, const json& jm,
                          const std::string& origin) {
  const int n = chart.dim();
  if (!jm.is_array() || static_cast<int>(jm.size()) != n)
    load_fail(origin, "field \"C\" must be a constant " + std::to_string(n) +
                          "x" + std::to_string(n) +
                          " matrix (entries: number or [re, im])");
  CMat c(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = jm.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      load_fail(origin, "field \"C\" row " + std::to_string(i) +
                            " must have " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) {
      const json& cell = row.at(j);
      if (cell.is_number()) {
        c(i, j) = std::complex<double>(cell.get<double>(), 0.0);
      } else if (cell.is_array() && cell.size() == 2 &&
                 cell.at(0).is_number() && cell.at(1).is_number()) {
        c(i, j) = std::complex<double>(cell.at(0).get<double>(),
                                       cell.at(1).get<double>());
      } else {
        load_fail(origin, "field \"C\"[" + std::to_string(i) + "][" +
                              std::to_string(j) +
                              "] must be a number or [re, im]");
      }
    }
  }
  const double square = max_abs(CMat(c * c + CMat::Identity(n, n)));
  if (square > 1e-8)
    load_fail(origin, "field \"C\" must square to -I (residual " +
                          fmt_short(square) + ")");
  return c;
}

const CheckSpec* find_check(const std::string& name) {
  for (const CheckSpec& spec : check_registry())
    if (spec.name == name) return &spec;
  return nullptr;
}

std::string all_check_names() {
  std::string s;
  for (const CheckSpec& spec : check_registry()) {
    if (!s.empty()) s += ", ";
    s += spec.name;
  }
  return s;
}

bool check_needs_metric(const std::string& name) {
  return name == "g_symmetry" || name == "orthogonality" ||
         name == "locally_product" || name == "levi_civita_compat";
}

bool check_needs_structure(const std::string& name) {
  return name != "levi_civita_compat";
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& origin, const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known)
      load_fail(origin, "unknown " + where + " key \"" + item.key() + "\"");
  }
}

}  // namespace

const std::vector<CheckSpec>& check_registry() {
  static const std::vector<CheckSpec> registry = {
      {"metallic", "J (or F, v, l+m)",
       "J^2 = a J + b I at every sample point"},
      {"projector_identities", "J (or F, v, l+m)",
       "l, m complementary idempotents with J l = rho l, J m = (a-rho) m"},
      {"nijenhuis_integrability", "J (or F, v, l+m)",
       "N_J vanishes on frame pairs (plus the X, Y probe pair when given)"},
      {"nf_nj_scaling", "J (or F, v, l+m)",
       "N_F = 4/(a^2+4b) N_J for the induced product structure F"},
      {"nj_symmetry", "J (or F, v, l+m)",
       "N_J(J X, Y) = N_J(X, J Y) on frame pairs"},
      {"schouten_parallel", "J (or F, v, l+m); gamma optional",
       "l, m, and J are parallel under the Schouten connection"},
      {"vranceanu_parallel", "J (or F, v, l+m); gamma optional",
       "l, m, and J are parallel under the Vranceanu connection"},
      {"half_parallel", "J (or F, v, l+m); gamma optional",
       "m-part of Delta J(lX, Y) equals (a-2rho) m[lX, mY] under Vranceanu"},
      {"anti_half_parallel", "J (or F, v, l+m); gamma optional",
       "Delta J(lX, Y) has vanishing l-part under the Vranceanu connection"},
      {"obata_parallel", "J (or F, v, l+m); gamma, Q optional",
       "J is parallel under the averaged connection built from the base"},
      {"g_symmetry", "g and J (or F, v, l+m)",
       "g(J X, Y) = g(X, J Y) at every sample point"},
      {"orthogonality", "g and J (or F, v, l+m)",
       "the rho- and (a-rho)-eigendistributions are g-orthogonal"},
      {"locally_product", "g and J (or F, v, l+m)",
       "induced F parallel under Levi-Civita; implies integrability"},
      {"connection_axioms", "J (or F, v, l+m); gamma optional",
       "additivity, Leibniz rule, and function-linearity of the connections"},
      {"levi_civita_compat", "g",
       "nabla g = 0 for the coefficients solved from the metric"},
  };
  return registry;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin,
                             const LoadOptions& opts) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    load_fail(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object())
    load_fail(origin, "top-level value must be an object");
  require_keys(doc,
               {"name", "coords", "dim", "params", "fields", "sampling",
                "tolerance", "check_tolerances", "metric", "allow_real_params",
                "checks"},
               origin, "top-level");

  // chart
  if (!doc.contains("coords") || !doc.at("coords").is_array() ||
      doc.at("coords").empty())
    load_fail(origin, "\"coords\" must be a nonempty array of names");
  std::vector<std::string> coords;
  for (const json& c : doc.at("coords")) {
    if (!c.is_string()) load_fail(origin, "coordinate names must be strings");
    coords.push_back(c.get<std::string>());
  }
  Chart chart = [&] {
    try {
      return Chart::make(coords);
    } catch (const Error& e) {
      load_fail(origin, e.what());
    }
  }();
  if (doc.contains("dim")) {
    if (!doc.at("dim").is_number_integer() ||
        doc.at("dim").get<int>() != chart.dim())
      load_fail(origin, "\"dim\" disagrees with the number of coordinates");
  }

  Scenario sc(chart);

  if (!doc.contains("name") || !doc.at("name").is_string() ||
      doc.at("name").get<std::string>().empty())
    load_fail(origin, "scenario requires a nonempty \"name\"");
  sc.name = doc.at("name").get<std::string>();

  // params
  if (!doc.contains("params") || !doc.at("params").is_object())
    load_fail(origin, "scenario requires \"params\": {\"a\": ..., \"b\": ...}");
  const double pa = number_field(doc.at("params"), "a", origin, "\"params\"");
  const double pb = number_field(doc.at("params"), "b", origin, "\"params\"");
  const bool allow_real =
      opts.allow_real_params || doc.value("allow_real_params", false);
  try {
    sc.params = allow_real ? MetallicParams::make_real(pa, pb)
                           : MetallicParams::make(pa, pb);
  } catch (const Error& e) {
    load_fail(origin, e.what());
  }

  // fields
  if (doc.contains("fields")) {
    const json& f = doc.at("fields");
    if (!f.is_object()) load_fail(origin, "\"fields\" must be an object");
    require_keys(f, {"J", "F", "T", "C", "v", "l", "m", "g", "gamma", "X", "Y", "Q"},
                 origin, "fields");
    auto tensor = [&](const char* key) {
      return TensorField11(chart, parse_square(chart, f.at(key), origin, key));
    };
    if (f.contains("J")) sc.J = tensor("J");
    if (f.contains("F")) sc.F = tensor("F");
    if (f.contains("T")) sc.T = tensor("T");
    if (f.contains("v")) sc.v = tensor("v");
    if (f.contains("l")) sc.l = tensor("l");
    if (f.contains("m")) sc.m = tensor("m");
    if (f.contains("g"))
      sc.g = MetricField(chart, parse_square(chart, f.at("g"), origin, "g"));
    if (f.contains("C")) sc.C = parse_complex_matrix(chart, f.at("C"), origin);
    if (f.contains("gamma"))
      sc.gamma = parse_cube(chart, f.at("gamma"), origin, "gamma");
    if (f.contains("Q"))
      sc.Q = TensorField12(chart, parse_cube(chart, f.at("Q"), origin, "Q"));
    if (f.contains("X")) sc.X = parse_vector(chart, f.at("X"), origin, "X");
    if (f.contains("Y")) sc.Y = parse_vector(chart, f.at("Y"), origin, "Y");
  }

  // sampling
  sc.sampling.box.assign(static_cast<std::size_t>(chart.dim()), {-2.0, 2.0});
  if (doc.contains("sampling")) {
    const json& s = doc.at("sampling");
    if (!s.is_object()) load_fail(origin, "\"sampling\" must be an object");
    require_keys(s, {"box", "count", "seed", "exclude"}, origin, "sampling");
    if (s.contains("box")) {
      const json& box = s.at("box");
      if (!box.is_array() || static_cast<int>(box.size()) != chart.dim())
        load_fail(origin, "\"sampling.box\" must list one [lo, hi] interval "
                          "per coordinate");
      sc.sampling.box.clear();
      for (const json& interval : box) {
        if (!interval.is_array() || interval.size() != 2 ||
            !interval.at(0).is_number() || !interval.at(1).is_number())
          load_fail(origin, "each sampling box interval must be [lo, hi]");
        sc.sampling.box.push_back(
            {interval.at(0).get<double>(), interval.at(1).get<double>()});
      }
    }
    if (s.contains("count")) {
      if (!s.at("count").is_number_integer() || s.at("count").get<int>() < 1)
        load_fail(origin, "\"sampling.count\" must be a positive integer");
      sc.sampling.count = s.at("count").get<int>();
    }
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_integer() ||
          (s.at("seed").is_number_integer() && s.at("seed").get<double>() < 0))
        load_fail(origin, "\"sampling.seed\" must be a non-negative integer");
      sc.sampling.seed = s.at("seed").get<std::uint64_t>();
    }
    if (s.contains("exclude")) {
      if (!s.at("exclude").is_string())
        load_fail(origin, "\"sampling.exclude\" must be an expression string");
      sc.sampling.exclude = parse_entry(chart, s.at("exclude"), origin,
                                        "\"sampling.exclude\"");
    }
  }

  // tolerances
  if (doc.contains("tolerance")) {
    if (!doc.at("tolerance").is_number() ||
        doc.at("tolerance").get<double>() <= 0.0)
      load_fail(origin, "\"tolerance\" must be a positive number");
    sc.tolerance = doc.at("tolerance").get<double>();
  }
  if (doc.contains("check_tolerances")) {
    const json& ct = doc.at("check_tolerances");
    if (!ct.is_object())
      load_fail(origin, "\"check_tolerances\" must map check names to numbers");
    for (const auto& item : ct.items()) {
      if (!find_check(item.key()))
        load_fail(origin, "check_tolerances names unknown check \"" +
                              item.key() + "\"; valid names: " +
                              all_check_names());
      if (!item.value().is_number() || item.value().get<double>() <= 0.0)
        load_fail(origin, "tolerance for \"" + item.key() +
                              "\" must be a positive number");
      sc.check_tolerances[item.key()] = item.value().get<double>();
    }
  }

  // metric signature declaration
  if (doc.contains("metric")) {
    if (!doc.at("metric").is_string())
      load_fail(origin, "\"metric\" must be \"riemannian\" or \"semi\"");
    const std::string kind = doc.at("metric").get<std::string>();
    if (kind == "semi") {
      sc.semi_riemannian = true;
    } else if (kind != "riemannian") {
      load_fail(origin, "\"metric\" must be \"riemannian\" or \"semi\"");
    }
  }

  // checks
  if (!doc.contains("checks") || !doc.at("checks").is_array() ||
      doc.at("checks").empty())
    load_fail(origin, "scenario requires a nonempty \"checks\" array");
  const bool has_structure = sc.J || sc.F || sc.v || (sc.l && sc.m);
  for (const json& c : doc.at("checks")) {
    if (!c.is_string()) load_fail(origin, "check names must be strings");
    const std::string name = c.get<std::string>();
    if (!find_check(name))
      load_fail(origin, "unknown check \"" + name +
                            "\"; valid names: " + all_check_names());
    if (check_needs_structure(name) && !has_structure)
      load_fail(origin, "check \"" + name +
                            "\" requires a structure field: J, F, v, or the "
                            "pair l and m");
    if (check_needs_metric(name) && !sc.g)
      load_fail(origin,
                "check \"" + name + "\" requires the metric field g");
    sc.checks.push_back(name);
  }
  return sc;
}

Scenario load_scenario(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path, opts);
}

// --- execution ----------------------------------------------------------------

namespace {

// Lazily derives J, the projector pair, and the base connection so that a
// derivation failure surfaces inside the check that needed it, not globally.
struct RunContext {
  RunContext(const Scenario& scenario, std::vector<Vec> pts)
      : sc(scenario), points(std::move(pts)) {
    for (int i = 0; i < sc.chart.dim(); ++i)
      frames.push_back(VectorField::frame(sc.chart, i));
    // Loose structural gate for derivations and connection preconditions;
    // the check tolerance alone decides pass/fail.
    gate = std::max(sc.tolerance, 1e-9);
  }

  const TensorField11& J() {
    if (!J_) {
      if (sc.J) {
        J_ = *sc.J;
      } else if (sc.F) {
        J_ = from_product(*sc.F, sc.params, points, gate);
      } else if (sc.v) {
        J_ = metallic_from_projector(*sc.v, sc.params, points, gate);
      } else if (sc.l && sc.m) {
        J_ = metallic_from_projector(*sc.m, sc.params, points, gate);
      } else {
        throw PreconditionError(
            "no field provides a metallic structure (give J, F, v, or l, m)");
      }
    }
    return *J_;
  }

  void ensure_projectors() {
    if (!l_) {
      if (sc.l && sc.m) {
        l_ = *sc.l;
        m_ = *sc.m;
      } else {
        Projectors pr = projectors(J(), sc.params, points, gate);
        l_ = std::move(pr.l);
        m_ = std::move(pr.m);
      }
    }
  }
  const TensorField11& l() { ensure_projectors(); return *l_; }
  const TensorField11& m() { ensure_projectors(); return *m_; }

  const Connection& base() {
    if (!base_) {
      if (sc.gamma) {
        ConnectionCoeffs coeffs =
            ConnectionCoeffs::from_components(sc.chart, *sc.gamma, false);
        const bool symm = coeffs.symmetry_residual(points) <= 1e-10;
        if (symm)
          coeffs = ConnectionCoeffs::from_components(sc.chart, *sc.gamma, true);
        base_ = to_connection(coeffs);
      } else {
        base_ = flat_connection(sc.chart);
      }
    }
    return *base_;
  }

  const Scenario& sc;
  std::vector<Vec> points;
  std::vector<VectorField> frames;
  double gate = 1e-9;
  std::optional<TensorField11> J_, l_, m_;
  std::optional<Connection> base_;
};

CheckResult check_nijenhuis_integrability(RunContext& ctx, double tol) {
  const TensorField11& J = ctx.J();
  ResidualTracker tr;
  for (const Vec& p : ctx.points) {
    double worst = 0.0;
    for (int i = 0; i < ctx.sc.chart.dim(); ++i)
      for (int j = i + 1; j < ctx.sc.chart.dim(); ++j)
        worst = std::max(
            worst, max_abs(nijenhuis(J, ctx.frames[i], ctx.frames[j], p)));
    if (ctx.sc.X && ctx.sc.Y)
      worst = std::max(worst, max_abs(nijenhuis(J, *ctx.sc.X, *ctx.sc.Y, p)));
    tr.update(worst, p);
  }
  const bool pass = tr.max_residual() <= tol;
  return tr.result("nijenhuis_integrability", tol,
                   pass ? "N_J = 0: integrable" : "N_J != 0: not integrable");
}

CheckResult check_nf_nj_scaling(RunContext& ctx, double tol) {
  const TensorField11& J = ctx.J();
  const MetallicParams& mp = ctx.sc.params;
  ResidualTracker tr;
  for (const Vec& p : ctx.points) {
    double worst = 0.0;
    for (int i = 0; i < ctx.sc.chart.dim(); ++i)
      for (int j = i + 1; j < ctx.sc.chart.dim(); ++j)
        worst = std::max(worst, nijenhuis_scaling_residual(
                                    J, mp.a, mp.b, ctx.frames[i],
                                    ctx.frames[j], p));
    if (ctx.sc.X && ctx.sc.Y)
      worst = std::max(worst, nijenhuis_scaling_residual(J, mp.a, mp.b,
                                                         *ctx.sc.X, *ctx.sc.Y,
                                                         p));
    tr.update(worst, p);
  }
  return tr.result("nf_nj_scaling", tol,
                   "N_F = 4/(a^2+4b) N_J for F = (2J - aI)/disc");
}

CheckResult check_nj_symmetry(RunContext& ctx, double tol) {
  const TensorField11& J = ctx.J();
  ResidualTracker tr;
  for (const Vec& p : ctx.points) {
    double worst = 0.0;
    for (int i = 0; i < ctx.sc.chart.dim(); ++i)
      for (int j = i + 1; j < ctx.sc.chart.dim(); ++j)
        worst = std::max(
            worst, nj_symmetry_residual(J, ctx.frames[i], ctx.frames[j], p));
    if (ctx.sc.X && ctx.sc.Y)
      worst = std::max(worst,
                       nj_symmetry_residual(J, *ctx.sc.X, *ctx.sc.Y, p));
    tr.update(worst, p);
  }
  return tr.result("nj_symmetry", tol, "N_J(J X, Y) = N_J(X, J Y)");
}

CheckResult check_parallel(RunContext& ctx, const std::string& name,
                           double tol) {
  ctx.ensure_projectors();
  const Connection conn =
      name == "schouten_parallel"
          ? schouten(ctx.base(), ctx.l(), ctx.m(), ctx.points, ctx.gate)
          : vranceanu(ctx.base(), ctx.l(), ctx.m(), ctx.points, ctx.gate);
  const TensorField11* fields[] = {&ctx.l(), &ctx.m(), &ctx.J()};
  ResidualTracker tr;
  const int n = ctx.sc.chart.dim();
  for (const Vec& p : ctx.points) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (const TensorField11* A : fields)
          worst = std::max(
              worst,
              max_abs(nabla_J(conn, *A, ctx.frames[i], ctx.frames[j], p)));
    tr.update(worst, p);
  }
  return tr.result(name, tol, "nabla l = nabla m = nabla J = 0");
}

CheckResult check_half_parallel(RunContext& ctx, const std::string& name,
                                double tol) {
  ctx.ensure_projectors();
  const Connection hat =
      vranceanu(ctx.base(), ctx.l(), ctx.m(), ctx.points, ctx.gate);
  const TensorField11& J = ctx.J();
  const int n = ctx.sc.chart.dim();
  const double c = ctx.sc.params.a - 2.0 * ctx.sc.params.rho;
  const bool anti = name == "anti_half_parallel";
  std::vector<VectorField> lframes, mframes;
  for (int i = 0; i < n; ++i) {
    lframes.push_back(ctx.l().apply(ctx.frames[i]));
    mframes.push_back(ctx.m().apply(ctx.frames[i]));
  }
  ResidualTracker tr;
  for (const Vec& p : ctx.points) {
    const Mat Lp = ctx.l().eval(p);
    const Mat Mp = ctx.m().eval(p);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec dj = delta_J(hat, J, lframes[i], ctx.frames[j], p);
        if (anti) {
          worst = std::max(worst, max_abs(Vec(Lp * dj)));
        } else {
          const Vec lhs = Mp * dj;
          const Vec rhs = c * (Mp * lie_bracket(lframes[i], mframes[j], p));
          worst = std::max(worst, max_abs(Vec(lhs - rhs)));
        }
      }
    tr.update(worst, p);
  }
  return tr.result(name, tol,
                   anti ? "Delta J(lX, Y) has no l-part"
                        : "m-part of Delta J(lX, Y) matches (a-2rho) m[lX, mY]");
}

CheckResult check_obata_parallel(RunContext& ctx, double tol) {
  const TensorField11& J = ctx.J();
  const Connection conn = obata_connection(ctx.base(), J, ctx.sc.params,
                                           ctx.sc.Q, ctx.points, ctx.gate);
  const int n = ctx.sc.chart.dim();
  ResidualTracker tr;
  for (const Vec& p : ctx.points) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(
            worst, max_abs(nabla_J(conn, J, ctx.frames[i], ctx.frames[j], p)));
    tr.update(worst, p);
  }
  return tr.result("obata_parallel", tol,
                   ctx.sc.Q ? "nabla J = 0 with the supplied difference tensor"
                            : "nabla J = 0 for the canonical member (Q = 0)");
}

CheckResult check_connection_axioms(RunContext& ctx, double tol) {
  Rng rng(ctx.sc.sampling.seed ^ 0x9e3779b97f4a7c15ULL);
  const Chart& chart = ctx.sc.chart;
  const VectorField X1 = random_polynomial_field(rng, chart);
  const VectorField X2 = random_polynomial_field(rng, chart);
  const VectorField Y1 = random_polynomial_field(rng, chart);
  const VectorField Y2 = random_polynomial_field(rng, chart);
  const Expr f = random_polynomial(rng, chart);

  ctx.ensure_projectors();
  std::vector<Connection> conns;
  conns.push_back(ctx.base());
  conns.push_back(schouten(ctx.base(), ctx.l(), ctx.m(), ctx.points, ctx.gate));
  conns.push_back(vranceanu(ctx.base(), ctx.l(), ctx.m(), ctx.points, ctx.gate));
  conns.push_back(obata_connection(ctx.base(), ctx.J(), ctx.sc.params, ctx.sc.Q,
                                   ctx.points, ctx.gate));
  double worst = 0.0;
  std::optional<Vec> worst_point;
  int evaluated = 0;
  for (const Connection& conn : conns) {
    const CheckResult r =
        connection_axioms_check(conn, X1, X2, Y1, Y2, f, ctx.points, tol);
    evaluated = r.points_evaluated;
    if (r.max_residual >= worst) {
      worst = r.max_residual;
      worst_point = r.worst_point;
    }
  }
  return CheckResult::from_max("connection_axioms", worst,
                               std::move(worst_point), evaluated, tol,
                               "base, schouten, vranceanu, obata");
}

CheckResult execute_check(RunContext& ctx, const std::string& name,
                          double tol) {
  if (check_needs_metric(name) && !ctx.sc.g)
    throw PreconditionError("check \"" + name +
                            "\" requires the metric field g");
  if (name == "metallic")
    return is_metallic(ctx.J(), ctx.sc.params, ctx.points, tol);
  if (name == "projector_identities") {
    ctx.ensure_projectors();
    return projector_identities_check(ctx.J(), ctx.l(), ctx.m(), ctx.sc.params,
                                      ctx.points, tol);
  }
  if (name == "nijenhuis_integrability")
    return check_nijenhuis_integrability(ctx, tol);
  if (name == "nf_nj_scaling") return check_nf_nj_scaling(ctx, tol);
  if (name == "nj_symmetry") return check_nj_symmetry(ctx, tol);
  if (name == "schouten_parallel" || name == "vranceanu_parallel")
    return check_parallel(ctx, name, tol);
  if (name == "half_parallel" || name == "anti_half_parallel")
    return check_half_parallel(ctx, name, tol);
  if (name == "obata_parallel") return check_obata_parallel(ctx, tol);
  if (name == "g_symmetry")
    return g_symmetry_check(*ctx.sc.g, ctx.J(), ctx.points, tol);
  if (name == "orthogonality") {
    ctx.ensure_projectors();
    return orthogonality_check(*ctx.sc.g, ctx.l(), ctx.m(), ctx.points, tol);
  }
  if (name == "locally_product")
    return locally_product_check(*ctx.sc.g, ctx.J(), ctx.sc.params, ctx.points,
                                 tol);
  if (name == "connection_axioms") return check_connection_axioms(ctx, tol);
  if (name == "levi_civita_compat")
    return metric_compatibility_check(levi_civita(*ctx.sc.g), *ctx.sc.g,
                                      ctx.points, tol);
  throw Error("unknown check \"" + name + "\"; valid names: " +
              all_check_names());
}

}  // namespace

Report run(const Scenario& sc) {
  if (static_cast<int>(sc.sampling.box.size()) != sc.chart.dim())
    throw Error("sampling box lists " + std::to_string(sc.sampling.box.size()) +
                " intervals for a " + std::to_string(sc.chart.dim()) +
                "-dimensional chart");
  std::vector<Vec> points = sample_points(sc.sampling);

  if (sc.g) {
    const double sym = sc.g->symmetry_residual(points);
    if (sym > 1e-8)
      throw Error("metric is not symmetric: residual " + fmt_short(sym));
    if (!sc.semi_riemannian) {
      for (const Vec& p : points) {
        Eigen::LLT<Mat> llt(sc.g->eval(p));
        if (llt.info() != Eigen::Success)
          throw Error("metric is not positive definite at (" + point_text(p) +
                      "); declare \"metric\": \"semi\" for semi-Riemannian "
                      "inputs");
      }
    }
  }

  RunContext ctx(sc, std::move(points));
  Report rep;
  rep.scenario = sc.name;
  rep.a = sc.params.a;
  rep.b = sc.params.b;
  rep.seed = sc.sampling.seed;
  for (const std::string& name : sc.checks) {
    double tol = sc.tolerance;
    if (auto it = sc.check_tolerances.find(name);
        it != sc.check_tolerances.end())
      tol = it->second;
    CheckResult rec;
    try {
      rec = execute_check(ctx, name, tol);
    } catch (const Error& e) {
      rec.name = name;
      rec.pass = false;
      rec.max_residual = -1.0;  // sentinel: no residual was computed
      rec.points_evaluated = 0;
      rec.note = std::string("error: ") + e.what();
    }
    rep.checks.push_back(std::move(rec));
  }
  return rep;
}

// --- report rendering ---------------------------------------------------------

bool Report::overall_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

std::string Report::canonical_json() const {
  std::string out = "{\"checks\":[";
  bool first = true;
  for (const CheckResult& c : checks) {
    if (!first) out += ',';
    first = false;
    out += "{\"max_residual\":" + fmt17(c.max_residual);
    out += ",\"name\":\"" + json_escape(c.name) + "\"";
    out += ",\"note\":\"" + json_escape(c.note) + "\"";
    out += ",\"pass\":";
    out += c.pass ? "true" : "false";
    out += ",\"points_evaluated\":" + std::to_string(c.points_evaluated);
    out += ",\"worst_point\":";
    if (c.worst_point) {
      out += '[';
      for (int i = 0; i < c.worst_point->size(); ++i) {
        if (i) out += ',';
        out += fmt17((*c.worst_point)(i));
      }
      out += ']';
    } else {
      out += "null";
    }
    out += '}';
  }
  out += "],\"name\":\"" + json_escape(scenario) + "\"";
  out += ",\"overall_pass\":";
  out += overall_pass() ? "true" : "false";
  out += ",\"params\":{\"a\":" + fmt17(a) + ",\"b\":" + fmt17(b) + "}";
  out += ",\"seed\":" + std::to_string(seed);
  out += ",\"version\":\"" + std::string(kToolVersion) + "\"}";
  return out;
}

std::string Report::text() const {
  std::ostringstream os;
  os << "scenario: " << scenario << "  (a=" << fmt_plain(a)
     << ", b=" << fmt_plain(b) << ", seed=" << seed << ")\n";
  int passed = 0;
  for (const CheckResult& c : checks) {
    if (c.pass) ++passed;
    std::string name = c.name;
    if (name.size() < 26) name.resize(26, ' ');
    os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << name << " ";
    if (c.points_evaluated == 0 && !c.pass) {
      os << "did not run";
    } else {
      os << "max residual " << fmt_short(c.max_residual) << " over "
         << c.points_evaluated << " points";
      if (!c.pass && c.worst_point)
        os << " at (" << point_text(*c.worst_point) << ")";
    }
    if (!c.note.empty()) os << " -- " << c.note;
    os << "\n";
  }
  os << "overall: " << (overall_pass() ? "PASS" : "FAIL") << " (" << passed
     << "/" << checks.size() << " checks)\n";
  return os.str();
}

// --- built-in demos -----------------------------------------------------------

namespace {

// The closing worked example's structure on the punctured plane: eigenvalue
// rho along the radial direction, a - rho along the angular one.
TensorField11 plane_metallic_field(const Chart& chart,
                                   const MetallicParams& mp) {
  const std::string rho = fmt17(mp.rho);
  const std::string sig = "(" + fmt17(mp.conjugate_root()) + ")";
  const std::string dd = fmt17(mp.disc);
  const std::string den = "(x^2 + y^2)";
  const std::string j11 = "(" + rho + "*x^2 + " + sig + "*y^2)/" + den;
  const std::string j12 = dd + "*x*y/" + den;
  const std::string j22 = "(" + sig + "*x^2 + " + rho + "*y^2)/" + den;
  return TensorField11::parse(chart, {{j11, j12}, {j12, j22}});
}

Scenario family2d_scenario(double a, double b, int samples,
                           std::uint64_t seed, double tol) {
  Scenario sc(Chart::make({"x", "y"}));
  sc.name = "family2d";
  sc.params = MetallicParams::make(a, b);
  Family2DSpec fs;
  fs.params = sc.params;
  fs.r = 0.0;
  fs.s = 1.0;
  fs.variant = Family2DVariant::generic_rs;
  sc.J = TensorField11::constant(sc.chart, family_2d(fs));
  sc.sampling.box = {{-1.0, 1.0}, {-1.0, 1.0}};
  sc.sampling.count = samples;
  sc.sampling.seed = seed;
  sc.tolerance = tol;
  sc.checks = {"metallic"};
  return sc;
}

CheckResult matrix_record(std::string name, double residual, double tol,
                          std::string note, int evaluated = 1) {
  return CheckResult::from_max(std::move(name), residual, std::nullopt,
                               evaluated, tol, std::move(note));
}

Report demo_clifford(const MetallicParams& mp, double tol) {
  Report rep;
  rep.scenario = "clifford";
  rep.a = mp.a;
  rep.b = mp.b;
  rep.seed = 0;
  const Mat J1 = clifford_metallic(1, mp);
  const Mat J2 = clifford_metallic(2, mp);
  rep.checks.push_back(matrix_record("clifford_j1_metallic",
                                     metallic_residual(J1, mp), tol,
                                     "J1 = (a/2) I + (disc/2) e1"));
  rep.checks.push_back(matrix_record("clifford_j2_metallic",
                                     metallic_residual(J2, mp), tol,
                                     "J2 = (a/2) I + (disc/2) e2"));
  rep.checks.push_back(matrix_record(
      "clifford_anticommutation",
      clifford_anticommutation_residual(J1, J2, mp), tol,
      "J1 J2 + J2 J1 = a (J1 + J2) - (a^2/2) I"));
  rep.checks.push_back(matrix_record(
      "clifford_spectrum",
      std::max(annihilating_spectrum_check(J1, mp),
               annihilating_spectrum_check(J2, mp)),
      tol, "(J - rho I)(J - (a - rho) I) = 0", 2));
  return rep;
}

Report demo_reflection(const MetallicParams& mp, double tol) {
  Report rep;
  rep.scenario = "reflection";
  rep.a = mp.a;
  rep.b = mp.b;
  rep.seed = 0;
  Vec v1(2), w1(2), v2(2), w2(2);
  v1 << 1, 1;
  w1 << 1, -1;
  v2 << 3, -4;
  w2 << 4, 3;
  double met = 0.0, axis = 0.0, perp = 0.0;
  const std::pair<Vec, Vec> cases[] = {{v1, w1}, {v2, w2}};
  for (const auto& [v, w] : cases) {
    const Mat Jv = metallic_reflection(v, mp);
    met = std::max(met, metallic_residual(Jv, mp));
    axis = std::max(axis, max_abs(Vec(Jv * v - mp.conjugate_root() * v)));
    perp = std::max(perp, max_abs(Vec(Jv * w - mp.rho * w)));
  }
  rep.checks.push_back(matrix_record(
      "reflection_metallic", met, tol,
      "rho I - (disc/<v,v>) v v^T satisfies the metallic polynomial", 2));
  rep.checks.push_back(
      matrix_record("reflection_axis_eigenvector", axis, tol,
                    "J_v v = (a - rho) v", 2));
  rep.checks.push_back(
      matrix_record("reflection_orthogonal_eigenvector", perp, tol,
                    "J_v w = rho w for w orthogonal to v", 2));
  return rep;
}

Report demo_triple(const MetallicParams& mp, double tol) {
  Report rep;
  rep.scenario = "triple";
  rep.a = mp.a;
  rep.b = mp.b;
  rep.seed = 0;
  Mat P1 = Mat::Zero(4, 4), P2 = Mat::Zero(4, 4);
  P1.diagonal() << 1, -1, 1, -1;
  P2.diagonal() << 1, 1, -1, -1;
  Mat F2 = Mat::Zero(2, 2), T2 = Mat::Zero(2, 2);
  F2 << 1, 0, 0, -1;
  T2 << 0, 1, 1, 0;
  Mat J0 = Mat::Zero(2, 2);
  J0 << 0, -1, 1, 0;
  Mat C1 = Mat::Zero(4, 4), C2 = Mat::Zero(4, 4);
  C1.block<2, 2>(0, 0) = J0;
  C1.block<2, 2>(2, 2) = J0;
  C2.block<2, 2>(0, 0) = J0;
  C2.block<2, 2>(2, 2) = -J0;
  struct Case {
    const char* name;
    Mat F, T;
    TripleKind kind;
    const char* note;
  };
  const Case cases[] = {
      {"triple_ahp", P1, P2, TripleKind::ahp,
       "commuting product pair: K = T F is product, J_K metallic"},
      {"triple_abpc", F2, T2, TripleKind::abpc,
       "anticommuting product pair: K is complex, J_K complex metallic"},
      {"triple_apbc", C1, C2, TripleKind::apbc,
       "commuting complex pair: K is product, J_K metallic"},
      {"triple_ahc", quaternion_unit(1), quaternion_unit(2), TripleKind::ahc,
       "anticommuting complex pair: K is complex, J_K complex metallic"},
  };
  for (const Case& c : cases) {
    const TripleResult r =
        triple_structure(c.F, c.T, c.kind, mp, std::max(tol, 1e-10));
    rep.checks.push_back(matrix_record(
        c.name, std::max(r.relation_residual, r.classification_residual), tol,
        c.note));
  }
  const AlgebraElement split_j = AlgebraElement::make(
      split_quaternion_unit(2).cast<std::complex<double>>(),
      AlgebraKind::split_quaternion_vector);
  const AlgebraElement quat_i = AlgebraElement::make(
      quaternion_unit(1).cast<std::complex<double>>(),
      AlgebraKind::unit_quaternion_vector);
  rep.checks.push_back(matrix_record(
      "split_quaternion_metallic",
      metallic_residual(
          quaternion_metallic(split_j, QuaternionFlavor::split, mp), mp),
      tol, "J = (a/2) I + (disc/2) j for the split unit j"));
  rep.checks.push_back(matrix_record(
      "biquaternion_metallic",
      metallic_residual(
          quaternion_metallic(quat_i, QuaternionFlavor::biquaternion, mp), mp),
      tol, "J = (a/2) I + (disc/2) i_c i for the quaternion unit i"));
  return rep;
}

Report demo_obata(const MetallicParams& mp, int samples, std::uint64_t seed,
                  double tol) {
  Report rep;
  rep.scenario = "obata";
  rep.a = mp.a;
  rep.b = mp.b;
  rep.seed = seed;
  const Chart chart = Chart::make({"x", "y"});
  SamplingPlan plan;
  plan.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  plan.count = samples;
  plan.seed = seed;
  plan.exclude = chart.parse("0.01 - (x^2 + y^2)");
  const std::vector<Vec> points = sample_points(plan);
  std::vector<VectorField> frames;
  for (int i = 0; i < chart.dim(); ++i)
    frames.push_back(VectorField::frame(chart, i));
  const Connection flat_conn = flat_connection(chart);
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = mp.rho;
  diag(1, 1) = mp.conjugate_root();
  const TensorField11 j_const = TensorField11::constant(chart, diag);
  const TensorField11 j_plane = plane_metallic_field(chart, mp);
  const double gate = 1e-8;
  Rng rng(seed ^ 0x517cc1b727220a95ULL);

  // Q = 0 with constant J: the construction must reproduce the base exactly.
  {
    const Connection conn = obata_connection(flat_conn, j_const, mp,
                                             std::nullopt, points, gate);
    const VectorField rx = random_polynomial_field(rng, chart);
    const VectorField ry = random_polynomial_field(rng, chart);
    ResidualTracker tr;
    for (const Vec& p : points) {
      double worst = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          worst = std::max(worst, max_abs(conn(frames[i], frames[j], p)));
      worst = std::max(
          worst, max_abs(Vec(conn(rx, ry, p) - flat_conn(rx, ry, p))));
      tr.update(worst, p);
    }
    rep.checks.push_back(
        tr.result("obata_flat_reduction", 1e-12,
                  "Q = 0 and constant J reproduce the base connection"));
  }

  auto parallel_record = [&](std::string name, const TensorField11& J,
                             bool random_q, std::string note) {
    ResidualTracker tr;
    const int rounds = random_q ? 20 : 1;
    for (int round = 0; round < rounds; ++round) {
      std::optional<TensorField12> Q;
      if (random_q) {
        std::vector<Expr> entries;
        for (int e = 0; e < 8; ++e)
          entries.push_back(random_polynomial(rng, chart));
        Q = TensorField12(chart, std::move(entries));
      }
      const Connection conn =
          obata_connection(flat_conn, J, mp, Q, points, gate);
      for (const Vec& p : points) {
        double worst = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            worst = std::max(
                worst, max_abs(nabla_J(conn, J, frames[i], frames[j], p)));
        tr.update(worst, p);
      }
    }
    rep.checks.push_back(tr.result(std::move(name), tol, std::move(note)));
  };
  parallel_record("obata_parallel_constant_j", j_const, true,
                  "constant J, flat base, 20 random difference tensors");
  parallel_record("obata_parallel_plane_field", j_plane, false,
                  "plane-field J, flat base, Q = 0");
  parallel_record("obata_parallel_plane_field_random_q", j_plane, true,
                  "plane-field J, flat base, 20 random difference tensors");
  return rep;
}

}  // namespace

Scenario builtin_r2_scenario(double a, double b, int samples,
                             std::uint64_t seed, double tol) {
  Scenario sc(Chart::make({"x", "y"}));
  sc.name = "r2_example";
  sc.params = MetallicParams::make(a, b);
  sc.J = plane_metallic_field(sc.chart, sc.params);
  sc.g = MetricField::identity(sc.chart);
  sc.sampling.box = {{-2.0, 2.0}, {-2.0, 2.0}};
  sc.sampling.count = samples;
  sc.sampling.seed = seed;
  sc.sampling.exclude = sc.chart.parse("0.01 - (x^2 + y^2)");
  sc.tolerance = tol;
  sc.checks = {"metallic",          "projector_identities",
               "nijenhuis_integrability", "schouten_parallel",
               "vranceanu_parallel", "g_symmetry",
               "orthogonality"};
  return sc;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "r2_example", "family2d", "clifford", "reflection", "triple", "obata"};
  return names;
}

Report run_builtin(const std::string& name, const DemoOptions& opts) {
  const double a = opts.a.value_or(name == "family2d" ? 2.0 : 1.0);
  const double b = opts.b.value_or(1.0);
  const std::uint64_t seed = opts.seed.value_or(42);
  if (name == "r2_example")
    return run(builtin_r2_scenario(a, b, opts.samples.value_or(100), seed,
                                   opts.tol.value_or(1e-8)));
  if (name == "family2d")
    return run(family2d_scenario(a, b, opts.samples.value_or(25), seed,
                                 opts.tol.value_or(1e-8)));
  const MetallicParams mp = MetallicParams::make(a, b);
  if (name == "clifford") return demo_clifford(mp, opts.tol.value_or(1e-12));
  if (name == "reflection")
    return demo_reflection(mp, opts.tol.value_or(1e-12));
  if (name == "triple") return demo_triple(mp, opts.tol.value_or(1e-12));
  if (name == "obata")
    return demo_obata(mp, opts.samples.value_or(50), seed,
                      opts.tol.value_or(1e-8));
  std::string names;
  for (const std::string& n : builtin_names()) {
    if (!names.empty()) names += ", ";
    names += n;
  }
  throw Error("unknown demo \"" + name + "\"; built-ins: " + names);
}

}  // namespace mtk
