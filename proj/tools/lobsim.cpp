#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lob/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Limit order book simulator and ergodicity checker"};
  app.set_version_flag("--version", std::string(lob::cli::kToolVersion));
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;

  const char* commands[][2] = {
      {"simulate", "Simulate paths; write CSV event logs and JSON summaries"},
      {"check", "Check the ergodicity hypotheses and fit drift certificates"},
      {"scaling", "Estimate the diffusion coefficient and test the diffusive scaling"},
      {"oracle", "Compare the simulated occupation with the truncated stationary law"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override simulation.seed");
    sub->add_option("--out", out_dir, "Override output.directory");
  }
  CLI11_PARSE(app, argc, argv);

  lob::cli::Overrides ov;
  ov.seed = seed;
  if (out_dir) ov.out_dir = *out_dir;
  const std::string command = app.get_subcommands().front()->get_name();
  return lob::cli::run_command(command, config, ov, std::cout, std::cerr);
}
