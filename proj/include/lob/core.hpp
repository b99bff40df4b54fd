#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lob/errors.hpp"

namespace lob {

using QueueSize = std::int64_t;

/// Geometry of the book: K limits per side around the reference price, tick size alpha.
struct BookParams {
  int K = 1;
  double tick = 1.0;

  /// Throws std::invalid_argument unless K >= 1 and tick > 0.
  void validate() const;
};

//
// Book indexing
//
// Limits are indexed by i in {-K..-1, 1..K}; there is no limit 0. Internally
// the 2K queues are stored in slots 0..2K-1 in increasing index order.
//

constexpr int slot_of(int i, int K) noexcept { return i < 0 ? i + K : i + K - 1; }
constexpr int index_of_slot(int s, int K) noexcept { return s < K ? s - K : s - K + 1; }

/// Signed queue sizes q_{-K..K}; negative entries are bid orders, positive entries ask orders.
///
/// Instances built through validate_state() are members of the state space.
/// The mutators exist for the simulation kernel, which re-establishes the
/// invariant after every event.
class OrderBookState {
 public:
  OrderBookState() = default;
  /// Empty book with K limits per side.
  explicit OrderBookState(int K) : q_(static_cast<std::size_t>(2 * K), 0) {}

  int depth() const noexcept { return static_cast<int>(q_.size() / 2); }
  std::size_t size() const noexcept { return q_.size(); }

  QueueSize operator[](int i) const { return q_[static_cast<std::size_t>(slot_of(i, depth()))]; }
  QueueSize& at_index(int i) { return q_[static_cast<std::size_t>(slot_of(i, depth()))]; }

  std::span<const QueueSize> slots() const noexcept { return q_; }
  std::span<QueueSize> mutable_slots() noexcept { return q_; }

  bool operator==(const OrderBookState&) const = default;
  auto operator<=>(const OrderBookState&) const = default;

  std::string to_string() const;

 private:
  friend OrderBookState make_unchecked_state(std::vector<QueueSize> slots);
  std::vector<QueueSize> q_;
};

/// Wraps raw slots without checking state-space membership.
OrderBookState make_unchecked_state(std::vector<QueueSize> slots);

struct OrderBookStateHash {
  std::size_t operator()(const OrderBookState& q) const noexcept;
};

/// max(-K-1, sup{i : q_i < 0}).
int best_bid_index(const OrderBookState& q) noexcept;
int best_bid_index(std::span<const QueueSize> slots) noexcept;
/// min(K+1, inf{i : q_i > 0}).
int best_ask_index(const OrderBookState& q) noexcept;
int best_ask_index(std::span<const QueueSize> slots) noexcept;

/// Returns true iff the sign pattern is admissible: no ask entry to the left of a bid entry.
bool in_state_space(std::span<const QueueSize> slots) noexcept;

/// Checked constructor. Throws SignPatternViolation naming the first ask entry
/// that sits at or left of the best bid; std::invalid_argument on odd length.
OrderBookState validate_state(std::span<const QueueSize> raw);
inline OrderBookState validate_state(std::initializer_list<QueueSize> raw) {
  return validate_state(std::span<const QueueSize>(raw.begin(), raw.size()));
}

//
// Prices
//

/// A price stored as an integer count of half ticks, so grid arithmetic stays exact.
struct Price {
  std::int64_t half_ticks = 1;

  double value(double tick) const noexcept { return static_cast<double>(half_ticks) * tick * 0.5; }
  /// Reference prices live on the shifted grid alpha * (0.5 + Z), i.e. odd half-tick counts.
  bool on_reference_grid() const noexcept { return (half_ticks % 2) != 0; }

  auto operator<=>(const Price&) const = default;
  Price operator+(Price o) const noexcept { return {half_ticks + o.half_ticks}; }
  Price operator-(Price o) const noexcept { return {half_ticks - o.half_ticks}; }
};

/// Converts a price value to half ticks; throws std::invalid_argument when it is off the half-tick grid.
Price price_from_value(double value, double tick);
/// Like price_from_value, additionally requiring the reference grid alpha * (0.5 + Z).
Price reference_price_from_value(double value, double tick);

/// Price of limit i: p_ref + (i - 0.5) alpha for i > 0, p_ref + (i + 0.5) alpha for i < 0.
/// Indices -K-1 and K+1 (saturated best quotes) follow the same rule.
Price price_of_index(Price p_ref, int i) noexcept;

struct MidAndSpread {
  Price mid;
  Price spread;
  /// 2 * i_mid, where i_mid = (i_bestbid + i_bestask) / 2 is a half-integer.
  int twice_mid_index = 0;
  /// Set when either side of the book is empty and a saturated index was used.
  bool saturated = false;

  double mid_index() const noexcept { return 0.5 * twice_mid_index; }
  double spread_ticks() const noexcept { return 0.5 * static_cast<double>(spread.half_ticks); }
};

MidAndSpread mid_and_spread(const OrderBookState& q, Price p_ref) noexcept;

/// Full Markov state: queue vector and reference price.
struct LobState {
  OrderBookState book;
  Price p_ref;

  bool operator==(const LobState&) const = default;
};

//
// Events
//

enum class EventKind : std::uint8_t { Increase, Decrease, PriceUp, PriceDown };
enum class PriceMoveMode : std::uint8_t { None, Shift, Reinit };

const char* to_string(EventKind kind) noexcept;
const char* to_string(PriceMoveMode mode) noexcept;

/// One generator transition. Pure jumps carry (index, size); price moves carry
/// the resolved mode and, for a shift, the boundary fill written at +-K.
struct Event {
  EventKind kind = EventKind::Increase;
  int index = 0;
  QueueSize size = 0;
  PriceMoveMode mode = PriceMoveMode::None;
  QueueSize fill = 0;

  bool is_price_move() const noexcept { return kind == EventKind::PriceUp || kind == EventKind::PriceDown; }
  bool operator==(const Event&) const = default;

  static Event increase(int i, QueueSize n) { return {EventKind::Increase, i, n}; }
  static Event decrease(int i, QueueSize n) { return {EventKind::Decrease, i, n}; }
  static Event price_up() { return {EventKind::PriceUp}; }
  static Event price_down() { return {EventKind::PriceDown}; }
};

}  // namespace lob
