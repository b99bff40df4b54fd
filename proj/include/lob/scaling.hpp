#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lob/rate_model.hpp"
#include "lob/simulation.hpp"
#include "lob/statistics.hpp"

namespace lob {

struct ScalingConfig {
  LobState initial;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  /// Long paths for sigma^2 and E[tau]: series_paths x series_events after burn-in.
  std::uint64_t series_paths = 10;
  std::uint64_t series_events = 1'000'000;
  LagPolicy lag;

  /// Short paths for the calendar-time variance ratios and normality statistics.
  std::uint64_t calendar_paths = 1000;
  /// Horizons are n * t * E[tau] in calendar time.
  std::vector<double> scales = {1e3, 1e4, 1e5};
  std::vector<double> times = {0.5, 1.0, 2.0};

  /// Events discarded per path; default max(1e5, 1% of the recorded length).
  std::optional<std::uint64_t> burn_in;
  /// Re-estimate sigma^2 and E[tau] with twice the burn-in.
  bool check_burn_in = true;
};

struct VarianceRatio {
  double n = 0.0;
  double t = 0.0;
  /// Calendar horizon n t E[tau].
  double horizon = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  /// Var(Z(N(horizon))) / (sigma2_calendar * horizon).
  double ratio = 0.0;
  double ratio_se = 0.0;
  std::size_t paths = 0;
};

struct ScalingReport {
  double tick = 1.0;
  std::uint64_t burn_in = 0;
  std::uint64_t series_events = 0;

  /// Price increments in price units, batch-means standard error.
  MeanEstimate mean_c;
  Sigma2Estimate sigma2_event;
  /// Cross-check of sigma2_event by pooled batch means.
  BatchVariance sigma2_batch;
  MeanEstimate e_tau;
  /// E[tau] over the first and second halves of every series path.
  MeanEstimate e_tau_first_half;
  MeanEstimate e_tau_second_half;
  double sigma2_calendar = 0.0;
  double sigma2_calendar_se = 0.0;

  std::vector<VarianceRatio> ratios;

  /// Z(N(T)) / sqrt(sigma2_calendar T) at the largest horizon, one per calendar path.
  std::vector<double> rescaled_terminal;
  double terminal_horizon = 0.0;
  Moments terminal_moments;
  KsResult terminal_ks;

  /// Burn-in doubling check.
  std::uint64_t doubled_burn_in = 0;
  std::optional<double> sigma2_doubled;
  std::optional<double> e_tau_doubled;
  bool burn_in_sensitive = false;

  bool nonzero_drift = false;
  std::vector<std::string> warnings;
};

/// Runs the series and calendar batches and assembles the report. Paths that
/// stop on an error are skipped with a warning.
ScalingReport scaling_report(const RateModel& model, const ScalingConfig& config);

/// Default burn-in for a recorded length of `events`: max(1e5, events / 100).
std::uint64_t default_burn_in(std::uint64_t events) noexcept;

/// Block length for the batch-means errors given the lag window.
std::size_t batch_block(std::size_t window) noexcept;

}  // namespace lob
