#include "lob/scan.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lob/simulation.hpp"

namespace lob {

namespace {

std::uint64_t checked_power(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int k = 0; k < exp; ++k) {
    if (r > (std::uint64_t{1} << 62) / base) throw std::invalid_argument("scan box is too large to index");
    r *= base;
  }
  return r;
}

}  // namespace

StateScan::StateScan(int K, QueueSize cap, std::vector<OrderBookState> extra, const RateModel* restrict_to)
    : K_(K), cap_(cap), restrict_(restrict_to) {
  if (K < 1) throw std::invalid_argument("K >= 1 required");
  if (cap < 0) throw std::invalid_argument("scan cap must be nonnegative");
  box_points_ = checked_power(static_cast<std::uint64_t>(2 * cap + 1), 2 * K);
  box_chunks_ = static_cast<std::size_t>(std::min<std::uint64_t>(box_points_, 256));
  // Keep extras that add something to the box, once each, in a canonical order.
  std::set<OrderBookState> seen;
  for (auto& q : extra) {
    if (q.depth() != K) throw std::invalid_argument("extra scan state has the wrong depth");
    const auto s = q.slots();
    const bool inside = std::all_of(s.begin(), s.end(), [cap](QueueSize x) { return x >= -cap && x <= cap; });
    if (!inside) seen.insert(std::move(q));
  }
  extra_.assign(seen.begin(), seen.end());
}

std::string StateScan::describe() const {
  std::ostringstream os;
  os << "all states with |q_i| <= " << cap_ << " (K = " << K_ << ")";
  if (restrict_ != nullptr && restrict_->restricts_space()) os << " admitted by " << restrict_->name();
  if (!extra_.empty()) os << " plus " << extra_.size() << " sampled states outside the box";
  return os.str();
}

std::uint64_t scan_size(const StateScan& scan, unsigned threads) {
  return scan_reduce(
      scan, threads, std::uint64_t{0}, [](std::uint64_t& n, const OrderBookState&) { ++n; },
      [](std::uint64_t& a, std::uint64_t b) { a += b; });
}

std::uint64_t count_box_states(int K, QueueSize cap) {
  // Slots left to right; once an ask entry has appeared, no bid entry may follow.
  const auto c = static_cast<std::uint64_t>(cap);
  std::uint64_t before_ask = 1;
  std::uint64_t after_ask = 0;
  for (int s = 0; s < 2 * K; ++s) {
    const std::uint64_t nb = before_ask * (1 + c);       // zero or bid
    const std::uint64_t na = after_ask * (1 + c) + before_ask * c;  // zero or ask
    before_ask = nb;
    after_ask = na;
  }
  return before_ask + after_ask;
}

namespace {

class CollectingSink final : public EventSink {
 public:
  CollectingSink(std::uint64_t spacing, std::size_t count) : spacing_(spacing), count_(count) {}
  void on_event(const EventRecord& r) override {
    if (r.seq % spacing_ == 0 && states.size() < count_) states.insert(*r.post);
  }
  std::set<OrderBookState> states;

 private:
  std::uint64_t spacing_;
  std::size_t count_;
};

}  // namespace

std::vector<OrderBookState> sample_states(const RateModel& model, std::size_t count, std::uint64_t seed,
                                          std::uint64_t spacing, std::uint64_t burn_in) {
  if (count == 0) return {};
  spacing = std::max<std::uint64_t>(spacing, 1);
  CollectingSink sink(spacing, count);
  EventSink* sinks[] = {&sink};
  SimulationOptions opt;
  opt.burn_in_events = burn_in;
  // Distinct states thin out in recurrent regions; bound the run length.
  opt.stop.max_events = static_cast<std::uint64_t>(count) * spacing * 20;
  Rng rng = make_path_rng(seed, 0);
  const LobState start{OrderBookState(model.book().K), Price{1}};
  const auto summary = simulate(model, start, opt, rng, sinks);
  (void)summary;
  return {sink.states.begin(), sink.states.end()};
}

QueueSize default_scan_cap(int K, std::uint64_t max_points, QueueSize max_cap) {
  QueueSize c = 0;
  for (QueueSize next = 1; next <= max_cap; ++next) {
    std::uint64_t p = 1;
    bool over = false;
    for (int k = 0; k < 2 * K && !over; ++k) {
      p *= static_cast<std::uint64_t>(2 * next + 1);
      over = p > max_points;
    }
    if (over) break;
    c = next;
  }
  return c;
}

}  // namespace lob
