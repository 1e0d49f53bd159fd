// darkline_main.cpp — command-line front end: steady states, sweeps, nulling
// conditions, the verification suite, and the stability/threshold locator.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "darkline/closedform.hpp"
#include "darkline/linsys.hpp"
#include "darkline/scenario.hpp"
#include "darkline/sweep.hpp"
#include "darkline/verify.hpp"

namespace {

using namespace darkline;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json complex_json(const Complex& z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::string complex_text(const Complex& z) {
  if (z.imag() == 0.0) return format_number(z.real());
  return format_number(z.real()) + (z.imag() < 0.0 ? "-" : "+") +
         format_number(std::abs(z.imag())) + "i";
}

json derived_json(const DerivedParams& p) {
  return {{"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}, {"g_total", p.g_total}, {"t", p.t}};
}

int cmd_steady(const std::string& scenario_path, std::optional<double> delta_flag,
               bool as_json) {
  const SchemeConfig config = parse_scenario(slurp(scenario_path));
  const double delta = delta_flag.value_or(config.signal.delta);
  const DerivedParams derived = derive(config);
  const StabilityReport stab = stability(config);

  if (!stab.stable) {
    if (as_json) {
      json j = {{"delta", delta},
                {"stable", false},
                {"slowest_rate", stab.slowest_rate},
                {"derived", derived_json(derived)},
                {"error", "configuration is dynamically unstable; no steady state"}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::printf("stable            = no (slowest rate %s)\n",
                  format_number(stab.slowest_rate).c_str());
      std::printf("no steady state: the homogeneous dynamics diverge\n");
    }
    return 1;
  }

  const SteadyState state = solve(build_system(config, delta));
  const TransferReport report = input_output(state, config);
  const BrightDarkAmplitudes bd = bright_dark_decompose(state, config);

  if (as_json) {
    json amplitudes = json::object();
    for (int k = 0; k < state.amplitudes.size(); ++k)
      amplitudes[state.variable_labels[static_cast<std::size_t>(k)]] =
          complex_json(state.amplitudes(k));
    json j = {{"delta", delta},
              {"stable", report.stable},
              {"slowest_rate", report.slowest_rate},
              {"derived", derived_json(derived)},
              {"amplitudes", amplitudes},
              {"alpha_out1", complex_json(report.alpha_out1)},
              {"alpha_out2", complex_json(report.alpha_out2)},
              {"chi", report.chi},
              {"abs2_bright", std::norm(bd.alpha_b)},
              {"abs2_dark", std::norm(bd.alpha_d)},
              {"flux",
               {{"in", report.flux_in},
                {"out", report.flux_out},
                {"internal_loss", report.flux_internal_loss},
                {"mechanical", report.flux_mechanical}}}};
    if (report.alpha_out3) j["alpha_out3"] = complex_json(*report.alpha_out3);
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("scheme            = %s\n", to_string(config.kind).c_str());
    std::printf("delta             = %s\n", format_number(delta).c_str());
    std::printf("derived           = c1 %s, c2 %s, c3 %s, g_total %s, t %s\n",
                format_number(derived.c1).c_str(), format_number(derived.c2).c_str(),
                format_number(derived.c3).c_str(), format_number(derived.g_total).c_str(),
                format_number(derived.t).c_str());
    for (int k = 0; k < state.amplitudes.size(); ++k)
      std::printf("%-17s = %s\n", state.variable_labels[static_cast<std::size_t>(k)].c_str(),
                  complex_text(state.amplitudes(k)).c_str());
    std::printf("alpha_out1        = %s\n", complex_text(report.alpha_out1).c_str());
    std::printf("alpha_out2        = %s\n", complex_text(report.alpha_out2).c_str());
    if (report.alpha_out3)
      std::printf("alpha_out3        = %s\n", complex_text(*report.alpha_out3).c_str());
    std::printf("chi               = %s\n", format_number(report.chi).c_str());
    std::printf("|alpha_bright|^2  = %s\n", format_number(std::norm(bd.alpha_b)).c_str());
    std::printf("|alpha_dark|^2    = %s\n", format_number(std::norm(bd.alpha_d)).c_str());
    std::printf("flux in/out/loss/mech = %s / %s / %s / %s\n",
                format_number(report.flux_in).c_str(), format_number(report.flux_out).c_str(),
                format_number(report.flux_internal_loss).c_str(),
                format_number(report.flux_mechanical).c_str());
    std::printf("stable            = yes (slowest rate %s)\n",
                format_number(report.slowest_rate).c_str());
  }
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& spec_path,
              const std::string& out_csv, const std::string& out_json, bool as_json) {
  if (out_csv.empty() && out_json.empty())
    throw std::runtime_error("sweep needs --out-csv and/or --out-json");
  const SchemeConfig config = parse_scenario(slurp(scenario_path));
  const SweepSpec spec = parse_sweep_spec(slurp(spec_path), config);
  const SweepResult result = run_sweep(spec);
  if (!out_csv.empty()) write_csv(result, out_csv);
  if (!out_json.empty()) write_json_summary(result, out_json);

  std::size_t stable_rows = 0;
  for (const auto& row : result.rows) stable_rows += row.stable ? 1 : 0;
  if (as_json) {
    json j = {{"rows", result.rows.size()}, {"stable_rows", stable_rows}};
    if (!out_csv.empty()) j["csv"] = out_csv;
    if (!out_json.empty()) j["summary"] = out_json;
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("sweep wrote %zu rows (%zu stable)\n", result.rows.size(), stable_rows);
    if (!out_csv.empty()) std::printf("  csv:     %s\n", out_csv.c_str());
    if (!out_json.empty()) std::printf("  summary: %s\n", out_json.c_str());
  }
  return 0;
}

int cmd_solve_condition(const std::string& scenario_path, bool as_json) {
  SchemeConfig config = parse_scenario(slurp(scenario_path));
  Complex value;
  const char* what = nullptr;
  switch (config.kind) {
    case SchemeKind::WeakDrive:
      value = solve_weak_drive_condition(config);
      what = "aux_drive.amplitude";
      break;
    case SchemeKind::Parametric:
      value = Complex{solve_parametric_condition(config), 0.0};
      what = "lambda";
      break;
    case SchemeKind::Baseline:
      throw ConfigError("nulling condition applies to weak_drive or parametric schemes");
  }
  const double residual = verify::nulling_ratio(config);

  if (as_json) {
    json j = {{"parameter", what},
              {"value", complex_json(value)},
              {"residual_bright_over_dark", residual}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("%s = %s\n", what, complex_text(value).c_str());
    std::printf("|alpha_bright|/|alpha_dark| at delta=0 with the condition applied: %s\n",
                format_number(residual).c_str());
  }
  return 0;
}

int cmd_verify(const std::string& scenario_path, int random_count, std::uint64_t seed,
               bool as_json) {
  verify::SuiteOptions options;
  options.seed = seed;
  if (!scenario_path.empty()) options.scenario = parse_scenario(slurp(scenario_path));
  if (random_count > 0) options.samples = random_count;

  const auto results = verify::run_suite(options);
  bool all_pass = true;
  for (const auto& r : results) all_pass = all_pass && r.pass;

  if (as_json) {
    json list = json::array();
    for (const auto& r : results)
      list.push_back({{"name", r.name},
                      {"pass", r.pass},
                      {"observed", r.observed},
                      {"bound", r.bound},
                      {"bound_is_minimum", r.bound_is_minimum},
                      {"detail", r.detail}});
    json j = {{"properties", list}, {"all_pass", all_pass}, {"seed", seed}};
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& r : results)
      std::printf("[%s] %-36s observed=%-12.4g %s=%-10.4g %s\n", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.observed, r.bound_is_minimum ? "min" : "max", r.bound,
                  r.detail.c_str());
    std::printf("%s\n", all_pass ? "all properties pass" : "FAILURES present");
  }
  return all_pass ? 0 : 1;
}

int cmd_stability(const std::string& scenario_path, const std::string& lambda_range,
                  bool as_json) {
  SchemeConfig config = parse_scenario(slurp(scenario_path));
  const StabilityReport report = stability(config);
  json j = {{"stable", report.stable}, {"slowest_rate", report.slowest_rate}};
  std::string text = std::string{"stable = "} + (report.stable ? "yes" : "no") +
                     ", slowest rate = " + format_number(report.slowest_rate);

  if (config.kind == SchemeKind::Parametric) {
    const DerivedParams p = derive(config);
    const double gamma_eff = config.mech.gamma_m * (1.0 + p.c1 + p.c2);
    double lo = 0.0, hi = 1.5 * gamma_eff;
    if (!lambda_range.empty()) {
      const auto colon = lambda_range.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("--lambda-range expects 'lo:hi'");
      lo = std::stod(lambda_range.substr(0, colon));
      hi = std::stod(lambda_range.substr(colon + 1));
    }
    const double threshold = locate_instability_threshold(config, lo, hi);
    const double reference = 0.5 * gamma_eff;
    j["threshold"] = threshold;
    j["adiabatic_reference"] = reference;
    j["relative_deviation"] = std::abs(threshold - reference) / reference;
    text += "\nthreshold |lambda| = " + format_number(threshold) +
            " (adiabatic reference " + format_number(reference) + ", deviation " +
            format_number(std::abs(threshold - reference) / reference) + ")";
  } else if (!lambda_range.empty()) {
    throw std::runtime_error("--lambda-range applies to the parametric scheme only");
  }

  if (as_json)
    std::cout << j.dump(2) << '\n';
  else
    std::printf("%s\n", text.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled cavity-mechanics conversion toolkit"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "emit JSON on stdout");

  std::string scenario_path, spec_path, out_csv, out_json, lambda_range;
  std::optional<double> delta_flag;
  int random_count = 0;
  std::uint64_t seed = 1;

  auto* steady = app.add_subcommand("steady", "solve one steady state and its transfer report");
  steady->add_option("scenario", scenario_path, "scenario file")->required();
  steady->add_option("--delta", delta_flag, "probe detuning (default: scenario value)");

  auto* sweep = app.add_subcommand("sweep", "run a parameter/detuning sweep to CSV/JSON");
  sweep->add_option("scenario", scenario_path, "scenario file")->required();
  sweep->add_option("spec", spec_path, "sweep spec JSON file")->required();
  sweep->add_option("--out-csv", out_csv, "CSV output path");
  sweep->add_option("--out-json", out_json, "JSON summary output path");

  auto* cond = app.add_subcommand("solve-condition",
                                  "solve the bright-mode nulling condition");
  cond->add_option("scenario", scenario_path, "scenario file")->required();

  auto* verify_cmd = app.add_subcommand("verify", "run the oracle/property suite");
  verify_cmd->add_option("scenario", scenario_path, "restrict checks to one scenario");
  verify_cmd->add_option("--random", random_count, "random configs per property");
  verify_cmd->add_option("--seed", seed, "RNG seed");

  auto* stab = app.add_subcommand("stability", "stability verdict and threshold locator");
  stab->add_option("scenario", scenario_path, "scenario file")->required();
  stab->add_option("--lambda-range", lambda_range, "bisection bracket 'lo:hi'");

  CLI11_PARSE(app, argc, argv);

  try {
    if (steady->parsed()) return cmd_steady(scenario_path, delta_flag, as_json);
    if (sweep->parsed()) return cmd_sweep(scenario_path, spec_path, out_csv, out_json, as_json);
    if (cond->parsed()) return cmd_solve_condition(scenario_path, as_json);
    if (verify_cmd->parsed()) return cmd_verify(scenario_path, random_count, seed, as_json);
    if (stab->parsed()) return cmd_stability(scenario_path, lambda_range, as_json);
  } catch (const std::exception& e) {
    if (as_json) {
      nlohmann::json j = {{"error", e.what()}};
      std::cout << j.dump(2) << '\n';
    }
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
