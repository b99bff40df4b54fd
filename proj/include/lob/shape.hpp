#pragma once

#include <map>
#include <utility>
#include <vector>

#include "lob/oracle.hpp"
#include "lob/simulation.hpp"

namespace lob {

/// Average book shape under a probability measure over books.
struct ShapeStatistics {
  int K = 0;
  /// E|q_i| per slot (limits -K..-1, 1..K).
  std::vector<double> mean_abs;
  /// E q_i per slot.
  std::vector<double> mean_signed;
  /// Spread in ticks -> probability.
  std::map<double, double> spread;
  /// i_mid -> probability.
  std::map<double, double> mid_index;
  /// Mass of books with an empty side.
  double saturated_mass = 0.0;
};

/// Weights need not be normalised; all-zero weights count as equal weights.
/// Throws std::invalid_argument for an empty measure.
ShapeStatistics shape_statistics(const std::vector<std::pair<OrderBookState, double>>& measure);
ShapeStatistics shape_statistics(const Occupation& occupation);
ShapeStatistics shape_statistics(const TruncatedGenerator& gen, const std::vector<double>& pi);

}  // namespace lob
