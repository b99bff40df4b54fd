#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lob/rate_model.hpp"
#include "lob/scan.hpp"

namespace lob {

/// Outcome of a drift fit QV <= -gamma V + B on a scan.
struct DriftCertificate {
  double z = 0.0;
  double U = 0.0;
  std::string scan_description;
  std::uint64_t scanned_states = 0;
  /// States with V above this value form the tail where the drift must be negative.
  double core_threshold = 0.0;
  double gamma_hat = 0.0;
  double B_hat = 0.0;
  /// Monte Carlo standard error of B (embedded check only).
  double B_stderr = 0.0;
  OrderBookState worst_state;
  double worst_drift = 0.0;
  bool violated = false;
  std::string reason;

  // Embedded check only.
  bool price_share_violated = false;
  double max_price_share = 0.0;
  std::optional<OrderBookState> price_share_witness;
};

/// Continuous-time drift QV(q) = sum over pure jumps of rate * (V(q') - V(q)),
/// with u = d = 0 regardless of the model. Throws RadiusExceeded / EmptyScan.
DriftCertificate drift_check_ctmc(const RateModel& model, double z, double U, const StateScan& scan,
                                  unsigned threads = 0);

/// Exact drift of V at one state (pure jumps only).
double ctmc_drift(const RateModel& model, const OrderBookState& q, double z, double U);

/// Monte Carlo estimates of the boundary and redraw expectations entering the embedded drift.
struct BoundaryMoments {
  double e_upper = 0.0;      // E[z^|l|], l ~ pi_K
  double e_lower = 0.0;      // E[z^|l|], l ~ pi_{-K}
  double e_inc = 0.0;        // E[V(Q)], Q ~ pi^inc
  double e_dec = 0.0;        // E[V(Q)], Q ~ pi^dec
  double se_upper = 0.0, se_lower = 0.0, se_inc = 0.0, se_dec = 0.0;
  std::uint64_t draws = 0;
};

/// Throws DivergentBoundaryMoment when z reaches a declared moment radius, or
/// when an estimate fails the stability check (relative standard error above
/// 0.1, or a single draw carrying more than 10% of the sum).
BoundaryMoments estimate_boundary_moments(const RateModel& model, double z, double U, std::uint64_t draws,
                                          std::uint64_t seed);

/// Expected one-step change of V for the embedded chain, pure jumps and price moves together.
double embedded_drift(const RateModel& model, const OrderBookState& q, double z, double U,
                      const BoundaryMoments& m);

struct EmbeddedOptions {
  std::uint64_t mc_draws = 100'000;
  std::uint64_t seed = 12345;
  /// Price-move share at or above 1 - eps off the finite set {max |q_i| <= U} is reported.
  double price_share_eps = 1e-6;
};

DriftCertificate drift_check_embedded(const RateModel& model, double z, double U, const StateScan& scan,
                                      const EmbeddedOptions& options = {}, unsigned threads = 0);

}  // namespace lob
