#include "lob/shape.hpp"

#include <algorithm>
#include <stdexcept>

namespace lob {

ShapeStatistics shape_statistics(const std::vector<std::pair<OrderBookState, double>>& measure) {
  if (measure.empty()) throw std::invalid_argument("shape statistics need a nonempty measure");
  ShapeStatistics s;
  s.K = measure.front().first.depth();
  const auto slots = static_cast<std::size_t>(2 * s.K);
  s.mean_abs.assign(slots, 0.0);
  s.mean_signed.assign(slots, 0.0);
  double total = 0.0;
  for (const auto& [q, w] : measure) total += w;
  const bool uniform = !(total > 0.0);
  for (const auto& [q, w0] : measure) {
    if (q.depth() != s.K) throw std::invalid_argument("books of different depth in one measure");
    const double w = uniform ? 1.0 / static_cast<double>(measure.size()) : w0 / total;
    if (w == 0.0) continue;
    const auto sl = q.slots();
    for (std::size_t k = 0; k < slots; ++k) {
      s.mean_abs[k] += w * static_cast<double>(sl[k] < 0 ? -sl[k] : sl[k]);
      s.mean_signed[k] += w * static_cast<double>(sl[k]);
    }
    const MidAndSpread ms = mid_and_spread(q, Price{1});
    s.spread[ms.spread_ticks()] += w;
    s.mid_index[ms.mid_index()] += w;
    if (ms.saturated) s.saturated_mass += w;
  }
  return s;
}

ShapeStatistics shape_statistics(const Occupation& occupation) {
  std::vector<std::pair<OrderBookState, double>> m(occupation.begin(), occupation.end());
  // Hash-map order is unspecified; sort so the floating-point sums are reproducible.
  std::sort(m.begin(), m.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return shape_statistics(m);
}

ShapeStatistics shape_statistics(const TruncatedGenerator& gen, const std::vector<double>& pi) {
  if (pi.size() != gen.size()) throw std::invalid_argument("distribution does not match the truncation");
  std::vector<std::pair<OrderBookState, double>> m;
  m.reserve(pi.size());
  for (std::size_t k = 0; k < pi.size(); ++k) m.emplace_back(gen.states[k], pi[k]);
  return shape_statistics(m);
}

}  // namespace lob
