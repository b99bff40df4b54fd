#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lob/parallel.hpp"
#include "lob/rate_model.hpp"

namespace lob {

/// A finite set of books to evaluate inequalities on: every member of the
/// state space with |q_i| <= cap, plus optional extra states (typically drawn
/// from a long simulation). When a model is given, states outside its
/// restricted space are skipped.
class StateScan {
 public:
  StateScan(int K, QueueSize cap, std::vector<OrderBookState> extra = {}, const RateModel* restrict_to = nullptr);

  int depth() const noexcept { return K_; }
  QueueSize cap() const noexcept { return cap_; }
  const std::vector<OrderBookState>& extra() const noexcept { return extra_; }
  /// (2 cap + 1)^(2K), before the state-space filter.
  std::uint64_t box_points() const noexcept { return box_points_; }
  std::string describe() const;

  /// The box is cut into a fixed number of chunks independent of the thread
  /// count, so chunk-wise reductions merged in order are deterministic.
  std::size_t chunk_count() const noexcept { return box_chunks_ + (extra_.empty() ? 0 : 1); }

  template <class F>
  void for_each_in_chunk(std::size_t chunk, F&& fn) const;

 private:
  bool keep(const OrderBookState& q) const {
    return in_state_space(q.slots()) && (restrict_ == nullptr || restrict_->admits(q));
  }

  int K_;
  QueueSize cap_;
  std::vector<OrderBookState> extra_;
  const RateModel* restrict_;
  std::uint64_t box_points_;
  std::size_t box_chunks_;
};

template <class F>
void StateScan::for_each_in_chunk(std::size_t chunk, F&& fn) const {
  if (chunk >= box_chunks_) {
    for (const auto& q : extra_)
      if (keep(q)) fn(q);
    return;
  }
  const std::uint64_t begin = box_points_ * chunk / box_chunks_;
  const std::uint64_t end = box_points_ * (chunk + 1) / box_chunks_;
  if (begin >= end) return;
  const auto radix = static_cast<std::uint64_t>(2 * cap_ + 1);
  OrderBookState q(K_);
  auto s = q.mutable_slots();
  // Last slot is the fastest-moving digit.
  std::uint64_t rest = begin;
  for (std::size_t d = s.size(); d-- > 0;) {
    s[d] = static_cast<QueueSize>(rest % radix) - cap_;
    rest /= radix;
  }
  for (std::uint64_t k = begin; k < end; ++k) {
    if (keep(q)) fn(static_cast<const OrderBookState&>(q));
    for (std::size_t d = s.size(); d-- > 0;) {
      if (s[d] < cap_) {
        ++s[d];
        break;
      }
      s[d] = -cap_;
    }
  }
}

/// Chunk-wise reduction over a scan. `visit(acc, q)` folds one state,
/// `merge(into, from)` combines chunk accumulators in chunk order.
template <class Acc, class Visit, class Merge>
Acc scan_reduce(const StateScan& scan, unsigned threads, const Acc& init, Visit visit, Merge merge) {
  std::vector<Acc> parts(scan.chunk_count(), init);
  parallel_for(parts.size(), threads, [&](std::size_t c) {
    Acc& acc = parts[c];
    scan.for_each_in_chunk(c, [&](const OrderBookState& q) { visit(acc, q); });
  });
  Acc out = init;
  for (const auto& p : parts) merge(out, p);
  return out;
}

/// Number of scanned states.
std::uint64_t scan_size(const StateScan& scan, unsigned threads = 0);

/// Number of members of the state space with |q_i| <= cap (no model restriction).
std::uint64_t count_box_states(int K, QueueSize cap);

/// Distinct books visited by a simulation of `model` from the empty book,
/// one every `spacing` events after `burn_in`, up to `count` states.
std::vector<OrderBookState> sample_states(const RateModel& model, std::size_t count, std::uint64_t seed,
                                          std::uint64_t spacing = 10, std::uint64_t burn_in = 10'000);

/// Largest cap C <= max_cap with (2C + 1)^(2K) <= max_points.
QueueSize default_scan_cap(int K, std::uint64_t max_points = 20'000'000, QueueSize max_cap = 30);

}  // namespace lob
