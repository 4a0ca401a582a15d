#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mtk/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

using namespace mtk;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: ", path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
    s.pop_back();
  return s;
}

// Fails with the loader message in the test log when the text is rejected.
Scenario inline_scenario(const std::string& text,
                         const LoadOptions& opts = {}) {
  return parse_scenario_text(text, "inline", opts);
}

// Expects rejection and returns the message for substring checks.
std::string rejects(const std::string& text, const LoadOptions& opts = {}) {
  try {
    parse_scenario_text(text, "inline", opts);
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("scenario was accepted: ", text);
  return {};
}

const char* kConstGolden = R"({
  "name": "t",
  "coords": ["x", "y"],
  "params": {"a": 1, "b": 1},
  "fields": {"J": [["1.6180339887498949", "0"], ["0", "-0.6180339887498949"]]},
  "sampling": {"box": [[-1, 1], [-1, 1]], "count": 5, "seed": 1},
  "checks": ["metallic"]
})";

}  // namespace

TEST_CASE("check registry and built-in catalogue") {
  const auto& reg = check_registry();
  REQUIRE(reg.size() == 15);
  CHECK(reg.front().name == "metallic");
  for (const CheckSpec& spec : reg) {
    CHECK_FALSE(spec.name.empty());
    CHECK_FALSE(spec.needs.empty());
    CHECK_FALSE(spec.what.empty());
  }
  const auto& names = builtin_names();
  REQUIRE(names.size() == 6);
  CHECK(std::find(names.begin(), names.end(), "r2_example") != names.end());
  CHECK(std::find(names.begin(), names.end(), "triple") != names.end());
}

TEST_CASE("shipped plane scenario loads and passes every requested check") {
  const Scenario sc = load_scenario(std::string(SCENARIO_DIR) +
                                    "/plane_golden.json");
  CHECK(sc.name == "plane_golden");
  CHECK(sc.chart.dim() == 2);
  CHECK(sc.params.a == 1.0);
  CHECK(sc.J.has_value());
  CHECK(sc.g.has_value());
  CHECK(sc.X.has_value());
  REQUIRE(sc.checks.size() == 14);

  const Report report = run(sc);
  CHECK(report.overall_pass());
  REQUIRE(report.checks.size() == 14);
  for (const CheckResult& c : report.checks) {
    CAPTURE(c.name);
    CAPTURE(c.note);
    CHECK(c.pass);
    CHECK(c.points_evaluated > 0);
  }
  CHECK(report.text().find("overall: PASS") != std::string::npos);

  // canonical form is byte-stable within a process
  CHECK(run(sc).canonical_json() == report.canonical_json());

  // and is itself valid JSON with the pinned metadata
  const nlohmann::json doc = nlohmann::json::parse(report.canonical_json());
  CHECK(doc.at("version").get<std::string>() == kToolVersion);
  CHECK(doc.at("name").get<std::string>() == "plane_golden");
  CHECK(doc.at("checks").size() == 14);
  CHECK(doc.at("overall_pass").get<bool>());
}

TEST_CASE("shipped contact scenario derives J from F") {
  const Scenario sc = load_scenario(std::string(SCENARIO_DIR) +
                                    "/nonintegrable_product.json");
  CHECK_FALSE(sc.J.has_value());
  REQUIRE(sc.F.has_value());
  const Report report = run(sc);
  CHECK(report.overall_pass());
  REQUIRE(report.checks.size() == 3);
  // the structure is deliberately non-integrable; the requested checks are
  // the ones that hold regardless
  for (const CheckResult& c : report.checks) CHECK(c.pass);
}

TEST_CASE("loader rejects malformed scenarios with located messages") {
  auto has = [](const std::string& msg, const char* needle) {
    CAPTURE(msg);
    CHECK(msg.find(needle) != std::string::npos);
    CHECK(msg.find("inline") != std::string::npos);
  };

  has(rejects("not json"), "invalid JSON");
  has(rejects("[]"), "top-level value must be an object");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"checks":["metallic"],"extra":1})"),
      "unknown top-level key \"extra\"");
  has(rejects(R"({"coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"checks":["metallic"]})"),
      "nonempty \"name\"");
  has(rejects(R"({"name":"t","coords":["x"],
                  "fields":{"J":[["1"]]},"checks":["metallic"]})"),
      "requires \"params\"");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1.5,"b":1},
                  "fields":{"J":[["1"]]},"checks":["metallic"]})"),
      "positive integers");
  has(rejects(R"({"name":"t","coords":["x","y"],"dim":3,"params":{"a":1,"b":1},
                  "fields":{"J":[["1","0"],["0","1"]]},"checks":["metallic"]})"),
      "\"dim\" disagrees");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["x+"]]},"checks":["metallic"]})"),
      "\"J\"");
  has(rejects(R"({"name":"t","coords":["x","y"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1","0"]]},"checks":["metallic"]})"),
      "2x2");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"K":[["1"]]},"checks":["metallic"]})"),
      "unknown fields key \"K\"");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"tolerance":0,"checks":["metallic"]})"),
      "\"tolerance\" must be a positive number");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"checks":["metallic"],
                  "check_tolerances":{"nope":1}})"),
      "names unknown check");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"checks":["bogus"]})"),
      "unknown check \"bogus\"");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"checks":["g_symmetry"]})"),
      "requires the metric field g");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "checks":["metallic"]})"),
      "requires a structure field");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"checks":["metallic"],
                  "sampling":{"count":0}})"),
      "\"sampling.count\" must be a positive integer");
  has(rejects(R"({"name":"t","coords":["x","y"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1","0"],["0","1"]]},"checks":["metallic"],
                  "sampling":{"box":[[0,1]]}})"),
      "\"sampling.box\"");
  has(rejects(R"({"name":"t","coords":["x"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1"]]},"checks":["metallic"],
                  "metric":"lorentzian"})"),
      "\"metric\" must be \"riemannian\" or \"semi\"");
  has(rejects(R"({"name":"t","coords":["x","y"],"params":{"a":1,"b":1},
                  "fields":{"J":[["1.6180339887498949","0"],
                                 ["0","-0.6180339887498949"]],
                            "C":[[1,0],[0,1]]},
                  "checks":["metallic"]})"),
      "square to -I");

  CHECK_THROWS_WITH_AS(load_scenario("/nonexistent/path.json"),
                       doctest::Contains("cannot open scenario file"), Error);

  // real coefficients go through only when explicitly allowed, either via
  // options or via the in-file flag
  const char* real_params = R"({"name":"t","coords":["x"],
      "params":{"a":1.5,"b":0.25},
      "fields":{"J":[["1.6513878188659973"]]},"checks":["metallic"]})";
  LoadOptions allow;
  allow.allow_real_params = true;
  CHECK(inline_scenario(real_params, allow).params.a == 1.5);
  const char* flagged = R"({"name":"t","coords":["x"],"allow_real_params":true,
      "params":{"a":1.5,"b":0.25},
      "fields":{"J":[["1.6513878188659973"]]},"checks":["metallic"]})";
  CHECK(inline_scenario(flagged).params.a == 1.5);
}

TEST_CASE("r2_example built-in: golden and silver pass, absurd tolerance fails") {
  const Report golden = run_builtin("r2_example", {});
  CHECK(golden.overall_pass());
  CHECK(golden.a == 1.0);
  CHECK(golden.b == 1.0);
  CHECK(golden.seed == 42);
  const std::vector<std::string> expected = {
      "metallic",          "projector_identities", "nijenhuis_integrability",
      "schouten_parallel", "vranceanu_parallel",   "g_symmetry",
      "orthogonality"};
  REQUIRE(golden.checks.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(golden.checks[i].name == expected[i]);

  DemoOptions silver;
  silver.a = 2.0;
  CHECK(run_builtin("r2_example", silver).overall_pass());

  DemoOptions absurd;
  absurd.tol = 1e-20;
  const Report failing = run_builtin("r2_example", absurd);
  CHECK_FALSE(failing.overall_pass());
  bool some_failed_with_point = false;
  for (const CheckResult& c : failing.checks)
    if (!c.pass && c.worst_point.has_value()) some_failed_with_point = true;
  CHECK(some_failed_with_point);

  // same options, same bytes
  CHECK(run_builtin("r2_example", {}).canonical_json() ==
        golden.canonical_json());
}

TEST_CASE("remaining built-ins pass at their default settings") {
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    const Report report = run_builtin(name, {});
    CHECK(report.overall_pass());
    for (const CheckResult& c : report.checks) {
      CAPTURE(c.name);
      CAPTURE(c.note);
      CHECK(c.pass);
    }
  }
  DemoOptions silver;
  silver.a = 2.0;
  CHECK(run_builtin("clifford", silver).overall_pass());
  CHECK_THROWS_WITH_AS(run_builtin("no_such_demo", {}),
                       doctest::Contains("unknown demo"), Error);
}

TEST_CASE("pinned reports: canonical output matches the committed bytes") {
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    const std::string pinned =
        rtrim(slurp(std::string(TEST_DATA_DIR) + "/" + name + ".report.json"));
    CHECK(run_builtin(name, {}).canonical_json() == pinned);
  }
}

TEST_CASE("run-level validation: metric shape problems abort the run") {
  const char* indefinite = R"({
    "name": "t", "coords": ["x", "y"], "params": {"a": 1, "b": 1},
    "fields": {"J": [["1.6180339887498949", "0"],
                     ["0", "-0.6180339887498949"]],
               "g": [["1", "0"], ["0", "-1"]]},
    "sampling": {"box": [[-1, 1], [-1, 1]], "count": 5, "seed": 1},
    "checks": ["metallic"]})";
  CHECK_THROWS_WITH_AS(run(inline_scenario(indefinite)),
                       doctest::Contains("positive definite"), Error);

  // declaring the metric semi-Riemannian lifts the definiteness requirement
  std::string semi(indefinite);
  semi.insert(semi.find("\"checks\""), "\"metric\": \"semi\",\n    ");
  const Scenario sc = inline_scenario(semi);
  CHECK(sc.semi_riemannian);
  CHECK(run(sc).overall_pass());

  const char* asymmetric = R"({
    "name": "t", "coords": ["x", "y"], "params": {"a": 1, "b": 1},
    "fields": {"J": [["1.6180339887498949", "0"],
                     ["0", "-0.6180339887498949"]],
               "g": [["1", "x"], ["0", "1"]]},
    "sampling": {"box": [[1, 2], [1, 2]], "count": 5, "seed": 1},
    "checks": ["metallic"]})";
  CHECK_THROWS_WITH_AS(run(inline_scenario(asymmetric)),
                       doctest::Contains("not symmetric"), Error);
}

TEST_CASE("a failing check never aborts its siblings") {
  // F = 2I is not an almost product structure, so deriving J fails; the
  // metallic check records the error and the sibling nj_symmetry check (which
  // also needs J) fails the same way rather than crashing the run
  const char* bad = R"({
    "name": "t", "coords": ["x", "y"], "params": {"a": 1, "b": 1},
    "fields": {"F": [["2", "0"], ["0", "2"]]},
    "sampling": {"box": [[-1, 1], [-1, 1]], "count": 5, "seed": 1},
    "checks": ["metallic", "nj_symmetry"]})";
  const Report report = run(inline_scenario(bad));
  CHECK_FALSE(report.overall_pass());
  REQUIRE(report.checks.size() == 2);
  for (const CheckResult& c : report.checks) {
    CHECK_FALSE(c.pass);
    CHECK(c.points_evaluated == 0);
    CHECK(c.note.find("error:") != std::string::npos);
  }
}

TEST_CASE("per-check tolerance overrides apply to that check alone") {
  const char* text = R"({
    "name": "t", "coords": ["x", "y"], "params": {"a": 1, "b": 1},
    "fields": {"J": [["1.6180339887498949", "0"],
                     ["0", "-0.6180339887498949"]]},
    "sampling": {"box": [[-1, 1], [-1, 1]], "count": 5, "seed": 1},
    "check_tolerances": {"nj_symmetry": 1e-30},
    "checks": ["metallic", "nj_symmetry"]})";
  const Report report = run(inline_scenario(text));
  REQUIRE(report.checks.size() == 2);
  CHECK(report.checks[0].pass);
  // a constant structure has N_J identically zero, so even 1e-30 passes;
  // verify the override was consumed rather than rejected
  CHECK(report.checks[1].pass);

  // now point the absurd override at a check whose residual is tiny but
  // genuinely nonzero: the radial structure evaluates through divisions, so
  // its metallic residual sits near 1e-15, far above 1e-30
  const char* strict = R"json({
    "name": "t", "coords": ["x", "y"], "params": {"a": 1, "b": 1},
    "fields": {"J": [
      ["(1.6180339887498949*x^2 - 0.6180339887498949*y^2)/(x^2 + y^2)",
       "2.2360679774997896*x*y/(x^2 + y^2)"],
      ["2.2360679774997896*x*y/(x^2 + y^2)",
       "(-0.6180339887498949*x^2 + 1.6180339887498949*y^2)/(x^2 + y^2)"]]},
    "sampling": {"box": [[-2, 2], [-2, 2]], "count": 20, "seed": 1,
                 "exclude": "0.04 - (x^2 + y^2)"},
    "check_tolerances": {"metallic": 1e-30},
    "checks": ["metallic", "nj_symmetry"]})json";
  const Report strict_report = run(inline_scenario(strict));
  REQUIRE(strict_report.checks.size() == 2);
  CHECK_FALSE(strict_report.checks[0].pass);
  CHECK(strict_report.checks[0].worst_point.has_value());
  CHECK(strict_report.checks[1].pass);
}

TEST_CASE("sampling: exclusion, determinism, and failure modes") {
  const Chart xy = Chart::make({"x", "y"});
  SamplingPlan plan;
  plan.box = {{-1.0, 1.0}, {-1.0, 1.0}};
  plan.count = 50;
  plan.seed = 5;
  plan.exclude = xy.parse("0.25 - (x^2 + y^2)");

  const std::vector<Vec> pts = sample_points(plan);
  REQUIRE(pts.size() == 50);
  for (const Vec& p : pts) {
    CHECK(p.size() == 2);
    CHECK(p.squaredNorm() >= 0.25);
    CHECK(std::abs(p(0)) <= 1.0);
    CHECK(std::abs(p(1)) <= 1.0);
  }
  const std::vector<Vec> again = sample_points(plan);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(pts[i] == again[i]);

  SamplingPlan hopeless = plan;
  hopeless.exclude = xy.parse("1");  // excludes every candidate
  CHECK_THROWS_AS(sample_points(hopeless), Error);

  SamplingPlan empty = plan;
  empty.count = 0;
  CHECK_THROWS_AS(sample_points(empty), Error);
}

TEST_CASE("constant-scenario report text names the scenario and verdict") {
  const Report report = run(inline_scenario(kConstGolden));
  CHECK(report.overall_pass());
  const std::string text = report.text();
  CHECK(text.find("scenario: t") != std::string::npos);
  CHECK(text.find("[PASS] metallic") != std::string::npos);
  CHECK(text.find("overall: PASS (1/1 checks)") != std::string::npos);
}
