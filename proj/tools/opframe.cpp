// opframe: command-line front end over scenario files.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "opframe/examples.hpp"
#include "opframe/report.hpp"

namespace {

using namespace opframe;

void emit(const nlohmann::json &report, const std::string &format) {
  if (format == "csv") {
    std::cout << to_csv(report);
  } else {
    std::cout << report.dump(2) << '\n';
  }
}

int verify(const RunOptions &options, const std::string &format) {
  const double tol = options.tol.value_or(1e-10);
  const int nodes = options.nodes.value_or(32);
  if (nodes < 1) {
    throw ScenarioError("--nodes", "expected a positive node count");
  }
  const auto result = verify_examples(tol, nodes);
  nlohmann::json report = {{"schema_version", 1},
                           {"command", "verify-examples"},
                           {"tolerance", tol},
                           {"nodes", nodes},
                           {"passed", result.passed()},
                           {"checks", result.to_json()}};
  emit(report, format);
  if (result.passed()) {
    return kExitOk;
  }
  const auto name = result.first_failure();
  std::string diagnostic;
  for (const auto &c : result.checks) {
    if (c.name == name) {
      diagnostic = c.diagnostic;
      break;
    }
  }
  std::cerr << "opframe: verify-examples: check " << name << " failed";
  if (!diagnostic.empty()) {
    std::cerr << ": " << diagnostic;
  }
  std::cerr << '\n';
  return kExitNotFrame;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Integral operator frames on Hilbert C*-modules"};
  app.require_subcommand(1);

  RunOptions options;
  std::string format = "json";
  std::string scenario_path;
  double tol = 0;
  int nodes = 0;
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  auto *tol_opt = app.add_option("--tol", tol, "Tolerance for the subcommand's main test");
  auto *nodes_opt = app.add_option("--nodes", nodes, "Quadrature node count override");
  app.add_option("--seed", options.seed, "Seed for sampled checks");
  app.add_option("--scenario", scenario_path, "Scenario file (JSON, schema v1)");
  app.add_flag("--timings", options.timings, "Include wall-clock timings");

  auto scenario_command = [&](const std::string &name, const std::string &help) {
    auto *sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("scenario", scenario_path, "Scenario file");
    return sub;
  };
  auto *analyze = scenario_command("analyze", "Frame bounds, classification and summaries");
  auto *reconstruct = scenario_command("reconstruct", "Recover x from y = S x");
  std::string method, relaxation;
  int max_iter = 0;
  auto *method_opt = reconstruct->add_option("--method", method)
                         ->check(CLI::IsMember({"direct", "neumann"}));
  auto *relax_opt = reconstruct->add_option("--relaxation", relaxation,
                                            "reciprocal_upper, optimal or a number in (0, 2/B)");
  auto *iter_opt = reconstruct->add_option("--max-iter", max_iter);
  auto *dual = scenario_command("dual", "Canonical dual family");
  auto *perturb = scenario_command("perturb", "Perturbation admissibility and envelopes");
  double c = 0;
  std::string k_choice;
  auto *c_opt = perturb->add_option("--c", c, "Constant additive weight");
  perturb->add_option("--K", k_choice, "Additive operator")->check(CLI::IsMember({"identity"}));
  scenario_command("independence", "Linear independence at the nodes");
  auto *verify_cmd = app.add_subcommand("verify-examples", "Re-derive the worked examples");
  verify_cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  if (*tol_opt) options.tol = tol;
  if (*nodes_opt) options.nodes = nodes;
  if (*method_opt) options.method = method;
  if (*relax_opt) options.relaxation = relaxation;
  if (*iter_opt) options.max_iter = max_iter;
  if (*c_opt) options.c = c;
  options.k_identity = k_choice == "identity";

  try {
    if (*verify_cmd) {
      return verify(options, format);
    }
    if (scenario_path.empty()) {
      std::cerr << "opframe: a scenario file is required\n" << app.help();
      return kExitUsage;
    }
    CLI::App *sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    const auto scenario = with_overrides(load_scenario(scenario_path), command, options);
    RunResult result;
    if (sub == analyze) {
      result = run_analyze(scenario, options);
    } else if (sub == reconstruct) {
      result = run_reconstruct(scenario, options);
    } else if (sub == dual) {
      result = run_dual(scenario, options);
    } else if (sub == perturb) {
      result = run_perturb(scenario, options);
    } else {
      result = run_independence(scenario, options);
    }
    emit(result.report, format);
    if (!result.message.empty()) {
      std::cerr << "opframe: " << command << ": " << result.message << '\n';
    }
    return result.exit_code;
  } catch (const ScenarioError &e) {
    std::cerr << "opframe: scenario error at " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception &e) {
    std::cerr << "opframe: " << e.what() << '\n';
    return kExitError;
  }
}
