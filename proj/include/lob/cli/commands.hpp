#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lob/cli/config.hpp"

namespace lob::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfigViolation = 2,
  kExitAbsorbing = 3,
  kExitAssumptionViolated = 4,
  kExitNonzeroDrift = 5,
  kExitStateSpaceTooLarge = 6,
};

/// Event logs (events_path<k>.csv) and summaries (summary_path<k>.json).
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
/// assumptions.json, drift_ctmc.json, drift_embedded.json.
int cmd_check(const RunConfig& config, std::ostream& out, std::ostream& err);
/// scaling.json, rescaled_terminal.csv, autocovariance.csv.
int cmd_scaling(const RunConfig& config, std::ostream& out, std::ostream& err);
/// oracle.json, distribution.csv.
int cmd_oracle(const RunConfig& config, std::ostream& out, std::ostream& err);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
};

/// Loads the config, applies the overrides and dispatches; maps every error to an exit code.
int run_command(const std::string& command, const std::filesystem::path& config_path, const Overrides& overrides,
                std::ostream& out, std::ostream& err);

}  // namespace lob::cli
