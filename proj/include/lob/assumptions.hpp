#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lob/rate_model.hpp"
#include "lob/scan.hpp"

namespace lob {

enum class AssumptionStatus { VerifiedOnScan, Violated, NotApplicable };
const char* to_string(AssumptionStatus s) noexcept;

/// Result for one numbered hypothesis. Margins are named numbers such as
/// "L", "r", "U", "z", "m", "B_f@1.1".
struct AssumptionEntry {
  int number = 0;
  std::string title;
  AssumptionStatus status = AssumptionStatus::NotApplicable;
  std::optional<OrderBookState> witness;
  std::map<std::string, double> margins;
  std::string note;
};

struct AssumptionReport {
  std::string scan_description;
  std::uint64_t scanned_states = 0;
  std::vector<double> z_grid;
  std::vector<double> U_grid;
  /// The value standing in for the limit z -> 1+.
  double z_limit = 0.0;
  std::vector<AssumptionEntry> entries;  // numbers 2..9 in order

  const AssumptionEntry& get(int number) const;
  bool any_violated() const;
};

struct AssumptionOptions {
  std::uint64_t mc_draws = 100'000;
  std::uint64_t seed = 12345;
  double z_limit = 1.0 + 1e-6;
  double price_share_eps = 1e-6;
};

/// Evaluates the hypotheses 2-9 on the scan. Report-only: never throws for a
/// failed inequality. Throws EmptyScan for an empty scan.
AssumptionReport check_assumptions(const RateModel& model, const StateScan& scan, const std::vector<double>& z_grid,
                                   const std::vector<double>& U_grid, const AssumptionOptions& options = {},
                                   unsigned threads = 0);

}  // namespace lob
