#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "lob/rate_model.hpp"
#include "lob/simulation.hpp"

namespace lob {

enum class PriceMode {
  /// u = d = 0: the pure-jump chain on its own.
  Frozen,
  /// Price moves kept as transitions of the book: shift with a boundary fill,
  /// or redraw, with both laws clamped to the cap.
  Collapsed,
};
const char* to_string(PriceMode m) noexcept;

/// Generator of the book process restricted to {|q_i| <= cap}. Jumps that
/// would leave the box land on the cap instead.
struct TruncatedGenerator {
  QueueSize cap = 0;
  PriceMode mode = PriceMode::Frozen;
  std::vector<OrderBookState> states;
  std::unordered_map<OrderBookState, std::size_t, OrderBookStateHash> index;
  /// Row-major generator: Q(x, y) is the rate from x to y; rows sum to zero.
  Eigen::SparseMatrix<double, Eigen::RowMajor> Q;

  std::size_t size() const noexcept { return states.size(); }
  /// Index of the coordinate-wise clamp of q, or size() if it is not enumerated.
  std::size_t find_projected(const OrderBookState& q) const;
};

/// Throws StateSpaceTooLarge when the state count exceeds `max_states`.
TruncatedGenerator truncated_generator(const RateModel& model, QueueSize cap, PriceMode mode,
                                       std::size_t max_states = 2'000'000);

struct StationaryResult {
  std::vector<double> pi;
  /// max |(pi Q)_j| / max |Q_ij|.
  double relative_residual = 0.0;
  /// Number of states outside the closed class (given probability 0).
  std::size_t transient_states = 0;
};

/// Solves pi Q = 0, sum pi = 1. Throws Reducible when there is more than one
/// closed communicating class, IllConditioned when the residual is too large.
StationaryResult stationary_solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& Q,
                                  double tolerance = 1e-10);
StationaryResult stationary_solve(const TruncatedGenerator& gen, double tolerance = 1e-10);

/// Strongly connected components with no outgoing edge.
std::vector<std::vector<std::size_t>> closed_classes(const Eigen::SparseMatrix<double, Eigen::RowMajor>& Q);

enum class OccupationProjection {
  /// Keep the books inside the box and renormalise: the law conditioned on
  /// the box, which is what truncation preserves for reversible dynamics.
  Condition,
  /// Clamp every coordinate onto the cap.
  Clamp,
};

struct ProjectedOccupation {
  /// Normalised weights over gen.states.
  std::vector<double> p;
  /// Fraction of the occupation spent outside the box.
  double outside_mass = 0.0;
};

/// All-zero weights count as equal weights.
ProjectedOccupation project_occupation(const TruncatedGenerator& gen, const Occupation& occupation,
                                       OccupationProjection how = OccupationProjection::Condition);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

/// Distribution over the enumerated states of `fine`, collapsed onto `coarse` by clamping.
std::vector<double> project_distribution(const TruncatedGenerator& fine, const std::vector<double>& pi,
                                         const TruncatedGenerator& coarse);

/// Simulation counterpart of the truncated generator: pure jumps that would
/// leave {|q_i| <= cap} land on the cap, and the box is the model's state
/// space. Price moves are delegated unchanged, so this matches the generator
/// in frozen mode only.
std::shared_ptr<const RateModel> confine_to_box(std::shared_ptr<const RateModel> base, QueueSize cap);

}  // namespace lob
