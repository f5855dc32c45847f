#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ivanov/scenario.hpp"

namespace {

using namespace ivanov;

struct CommonArgs {
  std::string config_path;
  std::string out_prefix = "out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string log_level = "info";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "scenario configuration file")->required();
  cmd->add_option("--out", args.out_prefix, "output path prefix");
  cmd->add_option("--set", args.overrides, "override a config value as section.key=value")
      ->take_all();
  cmd->add_option("--seed", args.seed, "override experiment.seed");
  cmd->add_option("--threads", args.threads, "override experiment.threads");
  cmd->add_option("--log-level", args.log_level, "quiet, info or debug");
}

ConfigDoc load_doc(const CommonArgs& args, bool experiment_flags = false) {
  ConfigDoc doc = ConfigDoc::parse_file(args.config_path);
  for (const auto& assignment : args.overrides) doc.apply_override(assignment);
  if (experiment_flags) {
    if (args.seed) doc.apply_override("experiment.seed=" + std::to_string(*args.seed));
    if (args.threads) doc.apply_override("experiment.threads=" + std::to_string(*args.threads));
  } else if (args.seed || args.threads) {
    throw ConfigError("--seed and --threads apply to the rates command only");
  }
  return doc;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write output file: " + path);
  file << contents;
}

void log_info(const CommonArgs& args, const std::string& message) {
  if (args.log_level != "quiet") std::cerr << "[ivanov] " << message << "\n";
}

JsonValue coefficients_json(const VectorX<double>& a) {
  JsonValue arr = JsonValue::array();
  for (Index i = 0; i < a.size(); ++i) arr.push(JsonValue::number(a[i]));
  return arr;
}

int run_fit(const CommonArgs& args) {
  ConfigDoc doc = load_doc(args);
  const FitJob job = load_fit_job(doc);
  const IvanovFit<double> fitted = fit(job.kernel, job.x, job.y, job.radius, job.options);

  JsonValue result = JsonValue::object();
  result.set("radius", JsonValue::number(fitted.radius));
  result.set("mu", JsonValue::number(fitted.multiplier));
  result.set("achieved_norm", JsonValue::number(fitted.achieved_norm));
  result.set("empirical_sse", JsonValue::number(fitted.empirical_sse));
  result.set("coefficients", coefficients_json(fitted.coefficients));

  JsonValue out = JsonValue::object();
  out.set("command", JsonValue::string("fit"));
  out.set("config", config_echo(doc));
  out.set("result", std::move(result));
  write_file(args.out_prefix + ".json", out.dump());
  log_info(args, "fit written to " + args.out_prefix + ".json");
  return 0;
}

int run_validate(const CommonArgs& args) {
  ConfigDoc doc = load_doc(args);
  const ValidateJob job = load_validate_job(doc);
  const ValidationGrid<double> grid = build_grid(job.grid_a, job.grid_b, job.train_x.rows());
  const AdaptiveFit<double> adaptive = select_radius(job.kernel, job.train_x, job.train_y, job.val_x,
                                                     job.val_y, grid, job.clip_bound, job.options);

  JsonValue risks = JsonValue::array();
  for (const auto& [radius, risk] : adaptive.validation_risks) {
    JsonValue entry = JsonValue::object();
    entry.set("radius", JsonValue::number(radius));
    entry.set("risk", JsonValue::number(risk));
    risks.push(std::move(entry));
  }

  JsonValue result = JsonValue::object();
  result.set("r_hat", JsonValue::number(adaptive.selected_radius));
  result.set("mu", JsonValue::number(adaptive.fit.multiplier));
  result.set("achieved_norm", JsonValue::number(adaptive.fit.achieved_norm));
  result.set("clip_bound", JsonValue::number(adaptive.clip_bound));
  result.set("risks", std::move(risks));
  result.set("coefficients", coefficients_json(adaptive.fit.coefficients));

  JsonValue out = JsonValue::object();
  out.set("command", JsonValue::string("validate"));
  out.set("config", config_echo(doc));
  out.set("result", std::move(result));
  write_file(args.out_prefix + ".json", out.dump());
  log_info(args, "validation written to " + args.out_prefix + ".json");
  return 0;
}

int run_bounds(const CommonArgs& args) {
  ConfigDoc doc = load_doc(args);
  const BoundsJob job = load_bounds_job(doc);
  const auto& p = job.params;

  JsonValue result = JsonValue::object();
  result.set("expectation_unclipped",
             JsonValue::number(bound_expectation_unclipped(p, job.radius, job.approx_l2)));
  result.set("expectation_clipped",
             JsonValue::number(bound_expectation_clipped(p, job.radius, job.approx_l2)));
  result.set("highprob_clipped",
             JsonValue::number(bound_highprob_clipped(p, job.radius, job.approx_sup)));
  result.set("validation_expectation",
             JsonValue::number(bound_validation_expectation(p, job.baseline_risk)));
  result.set("validation_highprob",
             JsonValue::number(bound_validation_highprob(p, job.baseline_risk)));
  result.set("optimal_radius_unclipped", JsonValue::number(optimal_radius_unclipped(p)));
  result.set("optimal_radius_unclipped_numeric",
             JsonValue::number(optimal_radius_unclipped_numeric(p)));
  result.set("optimal_radius_clipped", JsonValue::number(optimal_radius_clipped(p)));
  result.set("optimal_radius_highprob", JsonValue::number(optimal_radius_highprob(p)));
  const auto [d2, d3] = rate_constants_unclipped(p);
  result.set("rate_constant_unclipped_d2", JsonValue::number(d2));
  result.set("rate_constant_unclipped_d3", JsonValue::number(d3));
  result.set("rate_constant_clipped", JsonValue::number(rate_constant_clipped(p)));
  result.set("covering_bound",
             JsonValue::number(covering_bound(p.kernel_sup, p.rho, job.covering_eps)));
  result.set("entropy_integral",
             JsonValue::number(entropy_integral(p.kernel_sup, p.rho, job.entropy_upper, job.entropy_a)));
  result.set("entropy_integral_numeric",
             JsonValue::number(entropy_integral_numeric(p.kernel_sup, p.rho, job.entropy_upper,
                                                        job.entropy_a)));

  JsonValue out = JsonValue::object();
  out.set("command", JsonValue::string("bounds"));
  out.set("config", config_echo(doc));
  out.set("result", std::move(result));
  write_file(args.out_prefix + ".json", out.dump());
  log_info(args, "bounds written to " + args.out_prefix + ".json");
  return 0;
}

int run_rates(const CommonArgs& args) {
  ConfigDoc doc = load_doc(args, /*experiment_flags=*/true);
  RatesJob job = load_rates_job(doc);

  const RateReport report =
      job.mode == RatesMode::SelfTest
          ? self_test_report(job.n_values, job.scenario.target_exponent)
          : run_rate_experiment(job.scenario, job.n_values);

  JsonValue out = JsonValue::object();
  out.set("command", JsonValue::string("rates"));
  out.set("config", config_echo(doc));
  out.set("result", rate_report_summary(report));
  write_file(args.out_prefix + ".csv", rate_report_csv(report));
  write_file(args.out_prefix + ".json", out.dump());

  std::cout << "fitted slope: " << format_double17(report.fitted_slope) << "\n";
  log_info(args, "rate report written to " + args.out_prefix + ".{csv,json}");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norm-constrained kernel least-squares estimators, hold-out radius selection,\n"
               "error-bound evaluators and convergence-rate experiments"};
  app.require_subcommand(1);

  CommonArgs fit_args, validate_args, bounds_args, rates_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit one estimator at a fixed radius");
  add_common(fit_cmd, fit_args);
  CLI::App* validate_cmd = app.add_subcommand("validate", "select the radius on a hold-out set");
  add_common(validate_cmd, validate_args);
  CLI::App* bounds_cmd = app.add_subcommand("bounds", "evaluate the closed-form error bounds");
  add_common(bounds_cmd, bounds_args);
  CLI::App* rates_cmd = app.add_subcommand("rates", "run a convergence-rate experiment");
  add_common(rates_cmd, rates_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (validate_cmd->parsed()) return run_validate(validate_args);
    if (bounds_cmd->parsed()) return run_bounds(bounds_args);
    if (rates_cmd->parsed()) return run_rates(rates_args);
  } catch (const ivanov::ConfigError& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const std::domain_error& error) {
    std::cerr << "config error: " << error.what() << "\n";
    return 2;
  } catch (const ivanov::NumericError& error) {
    std::cerr << "numerical error: " << error.what() << "\n";
    return 3;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 3;
  }
  return 0;
}
