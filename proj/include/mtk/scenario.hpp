#pragma once

// Scenario-driven verification: load a declarative scenario (JSON), sample
// points, run named checks drawn from every module, and emit a report with
// a byte-stable canonical form.

#include "mtk/riemann.hpp"
#include "mtk/sampling.hpp"

#include <map>

namespace mtk {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// A declarative verification job: one chart, one parameter pair, named
/// fields, a sampling plan, and a list of checks to run.
struct Scenario {
  explicit Scenario(Chart c) : chart(std::move(c)) {}

  std::string name;
  Chart chart;
  MetallicParams params;

  std::optional<TensorField11> J;  // metallic structure
  std::optional<TensorField11> F;  // almost product (J derived when J absent)
  std::optional<TensorField11> T;  // almost tangent (reserved for demos/tests)
  std::optional<TensorField11> v;  // idempotent (J derived when J, F absent)
  std::optional<TensorField11> l, m;  // projector pair (derived from J if absent)
  std::optional<MetricField> g;
  std::optional<CMat> C;  // constant almost complex matrix (validated only)
  std::optional<std::vector<Expr>> gamma;  // base connection, [k][i][j] flattened
  std::optional<TensorField12> Q;          // Obata difference tensor
  std::optional<VectorField> X, Y;         // extra probe pair for N_J checks

  SamplingPlan sampling;
  double tolerance = 1e-8;
  std::map<std::string, double> check_tolerances;  // per-check overrides
  bool semi_riemannian = false;  // skip positive-definiteness when true
  std::vector<std::string> checks;
};

struct LoadOptions {
  bool allow_real_params = false;  // accept non-integer positive a, b
};

/// Parse and validate a scenario from a JSON file. Throws Error (with file
/// context) on malformed input, unknown check names, or missing fields.
Scenario load_scenario(const std::string& path, const LoadOptions& opts = {});
/// Same, from in-memory text (`origin` names the source in error messages).
Scenario parse_scenario_text(const std::string& text, const std::string& origin,
                             const LoadOptions& opts = {});

/// One registry entry: the check's name, the fields it needs, and what it
/// verifies.
struct CheckSpec {
  std::string name;
  std::string needs;
  std::string what;
};
const std::vector<CheckSpec>& check_registry();

struct Report {
  std::string scenario;
  double a = 0.0, b = 0.0;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool overall_pass() const;
  /// Canonical JSON: sorted keys, 17-significant-digit numbers, no
  /// whitespace. Byte-identical for identical (scenario, seed, version).
  std::string canonical_json() const;
  /// Human-readable multi-line summary.
  std::string text() const;
};

/// Execute every requested check over the sampled points. A check that hits
/// a domain/precondition error fails with the reason recorded; sibling
/// checks still run. Throws Error only for scenario-level problems
/// (unsampleable plan, asymmetric or non-definite metric, underivable J).
Report run(const Scenario& sc);

// --- built-in demos -----------------------------------------------------------

struct DemoOptions {
  std::optional<double> a, b;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

const std::vector<std::string>& builtin_names();

/// Run a built-in demo by name (r2_example, family2d, clifford, reflection,
/// triple, obata). Unknown names throw Error.
Report run_builtin(const std::string& name, const DemoOptions& opts = {});

/// The closing worked example: J built from the radial projector pair on the
/// punctured plane, with Euclidean g. Exposed for tests and the CLI.
Scenario builtin_r2_scenario(double a, double b, int samples,
                             std::uint64_t seed, double tol);

}  // namespace mtk
