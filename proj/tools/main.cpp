// Command-line front end: scenario verification, built-in demos, the 2x2
// family constructor, and the check catalog. Exit codes: 0 all checks pass,
// 1 at least one check failed, 2 usage or input error.

#include "mtk/families.hpp"
#include "mtk/scenario.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

int emit_report(const mtk::Report& rep, const std::string& format) {
  if (format == "structured")
    std::cout << rep.canonical_json() << "\n";
  else
    std::cout << rep.text();
  return rep.overall_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Chart-level verification toolkit for metallic structures "
      "(J^2 = a J + b I)"};
  app.require_subcommand(1);

  // verify
  std::string scenario_path;
  std::optional<double> v_tol;
  std::optional<int> v_samples;
  std::optional<std::uint64_t> v_seed;
  std::string v_format = "text";
  bool allow_real = false;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run a scenario file's checks and report residuals");
  verify->add_option("scenario", scenario_path, "Scenario file (JSON)")
      ->required();
  verify->add_option("--tol", v_tol, "Override the scenario tolerance")
      ->check(CLI::PositiveNumber);
  verify->add_option("--samples", v_samples, "Override the sample count")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", v_seed, "Override the sampling seed");
  verify->add_option("--report", v_format, "Report format (default: text)")
      ->check(CLI::IsMember({"text", "structured"}));
  verify->add_flag("--allow-real-params", allow_real,
                   "Accept non-integer positive coefficients a, b");

  // demo
  std::string demo_name;
  std::optional<double> d_a, d_b, d_tol;
  std::optional<int> d_samples;
  std::optional<std::uint64_t> d_seed;
  std::string d_format = "text";
  CLI::App* demo =
      app.add_subcommand("demo", "Run a built-in demonstration scenario");
  demo->add_option("name", demo_name,
                   "One of: r2_example, family2d, clifford, reflection, "
                   "triple, obata")
      ->required();
  demo->add_option("--a", d_a, "Coefficient a (positive integer)")
      ->check(CLI::PositiveNumber);
  demo->add_option("--b", d_b, "Coefficient b (positive integer)")
      ->check(CLI::PositiveNumber);
  demo->add_option("--samples", d_samples, "Sample count")
      ->check(CLI::PositiveNumber);
  demo->add_option("--seed", d_seed, "Sampling seed");
  demo->add_option("--tol", d_tol, "Check tolerance")
      ->check(CLI::PositiveNumber);
  demo->add_option("--report", d_format, "Report format (default: text)")
      ->check(CLI::IsMember({"text", "structured"}));

  // family
  double f_a = 0.0, f_b = 0.0, f_r = 0.0, f_s = 0.0, f_t = 0.0;
  std::string f_variant = "generic_rs";
  CLI::App* family = app.add_subcommand(
      "family", "Construct a member of the 2x2 family and print its residual");
  family->add_option("--a", f_a, "Coefficient a")->required();
  family->add_option("--b", f_b, "Coefficient b")->required();
  family->add_option("--r", f_r, "Top-left entry (or eigenvalue)");
  family->add_option("--s", f_s, "Lower-left entry (generic variants need s != 0)");
  family->add_option("--t", f_t, "Bottom-right entry (generic_st only)");
  family->add_option("--variant", f_variant, "Family variant")
      ->check(CLI::IsMember({"generic_rs", "generic_st", "triangular_lower",
                             "triangular_upper", "diagonal"}));

  CLI::App* list =
      app.add_subcommand("list-checks", "List the verification check catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0; any usage error exits 2
  }

  try {
    if (*verify) {
      mtk::LoadOptions lo;
      lo.allow_real_params = allow_real;
      mtk::Scenario sc = mtk::load_scenario(scenario_path, lo);
      if (v_tol) sc.tolerance = *v_tol;
      if (v_samples) sc.sampling.count = *v_samples;
      if (v_seed) sc.sampling.seed = *v_seed;
      return emit_report(mtk::run(sc), v_format);
    }
    if (*demo) {
      mtk::DemoOptions opts;
      opts.a = d_a;
      opts.b = d_b;
      opts.samples = d_samples;
      opts.seed = d_seed;
      opts.tol = d_tol;
      return emit_report(mtk::run_builtin(demo_name, opts), d_format);
    }
    if (*family) {
      mtk::Family2DSpec spec;
      spec.params = mtk::MetallicParams::make(f_a, f_b);
      spec.r = f_r;
      spec.s = f_s;
      spec.t = f_t;
      if (f_variant == "generic_rs")
        spec.variant = mtk::Family2DVariant::generic_rs;
      else if (f_variant == "generic_st")
        spec.variant = mtk::Family2DVariant::generic_st;
      else if (f_variant == "triangular_lower")
        spec.variant = mtk::Family2DVariant::triangular_lower;
      else if (f_variant == "triangular_upper")
        spec.variant = mtk::Family2DVariant::triangular_upper;
      else
        spec.variant = mtk::Family2DVariant::diagonal;
      const mtk::Mat J = mtk::family_2d(spec);
      std::cout << "J =\n" << J << "\n";
      std::printf("|J^2 - a J - b I| = %.3g\n",
                  mtk::metallic_residual(J, spec.params));
      return 0;
    }
    if (*list) {
      std::printf("%-26s %-36s %s\n", "check", "requires", "verifies");
      for (const mtk::CheckSpec& spec : mtk::check_registry())
        std::printf("%-26s %-36s %s\n", spec.name.c_str(), spec.needs.c_str(),
                    spec.what.c_str());
      return 0;
    }
  } catch (const mtk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
