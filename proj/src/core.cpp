#include "lob/core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lob {

void BookParams::validate() const {
  if (K < 1) throw std::invalid_argument("K >= 1 required, got " + std::to_string(K));
  if (!(tick > 0.0) || !std::isfinite(tick)) throw std::invalid_argument("tick > 0 required");
}

std::string OrderBookState::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t s = 0; s < q_.size(); ++s) {
    if (s) os << ',';
    os << q_[s];
  }
  os << ']';
  return os.str();
}

OrderBookState make_unchecked_state(std::vector<QueueSize> slots) {
  OrderBookState q;
  q.q_ = std::move(slots);
  return q;
}

std::size_t OrderBookStateHash::operator()(const OrderBookState& q) const noexcept {
  // FNV-1a over the slot values
  std::uint64_t h = 1469598103934665603ULL;
  for (QueueSize v : q.slots()) {
    auto u = static_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (u >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return static_cast<std::size_t>(h);
}

int best_bid_index(std::span<const QueueSize> slots) noexcept {
  const int K = static_cast<int>(slots.size() / 2);
  for (int s = 2 * K - 1; s >= 0; --s)
    if (slots[static_cast<std::size_t>(s)] < 0) return index_of_slot(s, K);
  return -K - 1;
}

int best_ask_index(std::span<const QueueSize> slots) noexcept {
  const int K = static_cast<int>(slots.size() / 2);
  for (int s = 0; s < 2 * K; ++s)
    if (slots[static_cast<std::size_t>(s)] > 0) return index_of_slot(s, K);
  return K + 1;
}

int best_bid_index(const OrderBookState& q) noexcept { return best_bid_index(q.slots()); }
int best_ask_index(const OrderBookState& q) noexcept { return best_ask_index(q.slots()); }

bool in_state_space(std::span<const QueueSize> slots) noexcept {
  bool seen_ask = false;
  for (QueueSize v : slots) {
    if (v > 0) seen_ask = true;
    else if (v < 0 && seen_ask) return false;
  }
  return true;
}

OrderBookState validate_state(std::span<const QueueSize> raw) {
  if (raw.empty() || raw.size() % 2 != 0)
    throw std::invalid_argument("queue vector must have even positive length 2K, got " +
                                std::to_string(raw.size()));
  const int K = static_cast<int>(raw.size() / 2);
  const int bid = best_bid_index(raw);
  for (int s = 0; s < 2 * K; ++s) {
    const int i = index_of_slot(s, K);
    if (i > bid) break;
    if (raw[static_cast<std::size_t>(s)] > 0) {
      throw SignPatternViolation(i, "ask entry at index " + std::to_string(i) +
                                        " lies left of the bid entry at index " + std::to_string(bid));
    }
  }
  return make_unchecked_state(std::vector<QueueSize>(raw.begin(), raw.end()));
}

Price price_from_value(double value, double tick) {
  const double h = 2.0 * value / tick;
  const double r = std::round(h);
  if (!std::isfinite(h) || std::abs(h - r) > 1e-9 * std::max(1.0, std::abs(h)))
    throw std::invalid_argument("price " + std::to_string(value) + " is not on the half-tick grid");
  return Price{static_cast<std::int64_t>(r)};
}

Price reference_price_from_value(double value, double tick) {
  Price p = price_from_value(value, tick);
  if (!p.on_reference_grid())
    throw std::invalid_argument("reference price " + std::to_string(value) +
                                " must lie on the grid tick * (0.5 + integer)");
  return p;
}

Price price_of_index(Price p_ref, int i) noexcept {
  // p_ref + (i - 1/2) alpha  ->  half ticks: 2i - 1
  return Price{p_ref.half_ticks + (i > 0 ? 2 * i - 1 : 2 * i + 1)};
}

MidAndSpread mid_and_spread(const OrderBookState& q, Price p_ref) noexcept {
  const int K = q.depth();
  const int bid = best_bid_index(q);
  const int ask = best_ask_index(q);
  const Price pb = price_of_index(p_ref, bid);
  const Price pa = price_of_index(p_ref, ask);
  MidAndSpread out;
  out.twice_mid_index = bid + ask;
  out.spread = pa - pb;
  // Midpoint of the two best quotes; equals p_ref + alpha * i_mid whenever the
  // quotes straddle p_ref.
  out.mid = Price{(pb.half_ticks + pa.half_ticks) / 2};
  out.saturated = (bid == -K - 1) || (ask == K + 1);
  return out;
}

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Increase: return "increase";
    case EventKind::Decrease: return "decrease";
    case EventKind::PriceUp: return "price_up";
    case EventKind::PriceDown: return "price_down";
  }
  return "?";
}

const char* to_string(PriceMoveMode mode) noexcept {
  switch (mode) {
    case PriceMoveMode::None: return "none";
    case PriceMoveMode::Shift: return "shift";
    case PriceMoveMode::Reinit: return "reinit";
  }
  return "?";
}

}  // namespace lob
