// lwire: bound states of leaky wires with a one-sided bias.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lwire/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Discrete spectrum of leaky broken-line and filleted wires with a one-sided bias"};
  app.require_subcommand(1);

  lwire::CommonOptions common;
  if (const char* env = std::getenv("LWIRE_JOBS")) {
    try {
      common.jobs = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: LWIRE_JOBS must be an integer\n";
      return 2;
    }
  }
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> axis, values, family;
  double alpha = 1.0, v0 = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output path");
    sub->add_option("--seed", seed, "Seed for iterative starting vectors");
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* tr = app.add_subcommand("transverse", "Closed-form and FD spectrum of the transverse operator");
  tr->add_option("--alpha", alpha, "Delta coupling")->required();
  tr->add_option("--v0", v0, "Bias height")->required();

  auto* solve = app.add_subcommand("solve", "Ladder scan, verdict and record");
  add_common(solve);
  auto* sweep = app.add_subcommand("sweep", "One parameter sweep as a CSV table");
  add_common(sweep);
  sweep->add_option("--axis", axis, "beta, v0 or alpha");
  sweep->add_option("--values", values, "Comma-separated values");
  auto* conv = app.add_subcommand("converge", "Convergence study in h and R");
  add_common(conv);
  auto* cert = app.add_subcommand("certify", "Variational certificate search");
  add_common(cert);
  cert->add_option("--family", family, "auto, theorem4, theorem6, prop1 or prop2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  common.out = out;
  common.seed = seed;
  if (*tr) return lwire::cmd_transverse(alpha, v0, std::cout, std::cerr);
  if (*solve) return lwire::cmd_solve(config, common, std::cout, std::cerr);
  if (*sweep) return lwire::cmd_sweep(config, axis, values, common, std::cout, std::cerr);
  if (*conv) return lwire::cmd_converge(config, common, std::cout, std::cerr);
  return lwire::cmd_certify(config, family, common, std::cout, std::cerr);
}
