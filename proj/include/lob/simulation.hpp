#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lob/rate_model.hpp"
#include "lob/rng.hpp"

namespace lob {

/// Frame shift after an up move: [q_{-K+1}, ..., q_K, l].
void shift_up(OrderBookState& q, QueueSize l) noexcept;
/// Frame shift after a down move: [l, q_{-K}, ..., q_{K-1}].
void shift_down(OrderBookState& q, QueueSize l) noexcept;

/// Draws the waiting time and the next event at q. Price moves come back
/// unresolved (mode None); apply_event decides between shift and redraw.
/// `scratch` is reused between calls to avoid allocation.
std::pair<double, Event> sample_next(const RateModel& model, const BookView& v, Rng& rng,
                                     std::vector<Transition>& scratch);
std::pair<double, Event> sample_next(const RateModel& model, const OrderBookState& q, Rng& rng);

/// Applies `event` in place and returns it with the price-move mode and fill
/// resolved. Unresolved price moves always consume one uniform for the redraw
/// decision; a price move given with mode Shift is replayed with its fill and
/// draws nothing.
/// Throws InvalidEvent when a pure jump would leave the state space, reverse
/// the sign of a queue, or leave the model's restricted space.
Event apply_event_inplace(const RateModel& model, LobState& state, const Event& event, Rng& rng);
LobState apply_event(const RateModel& model, const LobState& state, const Event& event, Rng& rng);

/// One transition as seen by a sink.
struct EventRecord {
  std::uint64_t seq = 0;
  double t = 0.0;
  double tau = 0.0;
  Event event;
  /// Price increment in ticks: -1, 0 or +1.
  int c_ticks = 0;
  Price p_ref;
  const OrderBookState* post = nullptr;
};

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void on_event(const EventRecord& r) = 0;
  virtual void finish() {}
};

/// CSV event log: seq,t,tau,kind,index,size,c,p_ref[,q_-K..q_K].
/// For a shift, index is +-K and size the boundary fill; a redraw has index 0.
/// With `state_every` = k > 0 the queue columns are filled on every k-th row only.
class CsvEventSink final : public EventSink {
 public:
  CsvEventSink(std::ostream& out, const BookParams& book, std::uint64_t state_every, std::string header_comment);
  void on_event(const EventRecord& r) override;
  void finish() override;

 private:
  std::ostream& out_;
  BookParams book_;
  std::uint64_t state_every_;
  std::string line_;
};

/// Writes a double with 17 significant digits.
void append_double(std::string& s, double x);

struct StopCriterion {
  std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
  double max_time = std::numeric_limits<double>::infinity();
};

struct SimulationOptions {
  StopCriterion stop;
  /// Events discarded before recording starts; the clock and Z restart afterwards.
  std::uint64_t burn_in_events = 0;
  /// Keep the per-event (c, tau) arrays.
  bool record_embedded = false;
  /// Keep the time-weighted occupation measure over visited books.
  bool record_occupation = false;
  /// Calendar times (after burn-in, increasing) at which Z(N(t)) is recorded.
  std::vector<double> checkpoints;
};

using Occupation = std::unordered_map<OrderBookState, double, OrderBookStateHash>;

struct PathSummary {
  std::uint64_t path = 0;
  LobState initial;
  LobState final_state;
  std::uint64_t events = 0;
  double elapsed = 0.0;
  /// Z(N(elapsed)) in ticks.
  std::int64_t z_ticks = 0;
  std::uint64_t up_moves = 0;
  std::uint64_t down_moves = 0;
  double sum_tau = 0.0;
  double sum_tau_sq = 0.0;
  std::vector<std::int8_t> c_ticks;
  std::vector<double> tau;
  /// Z(N(t)) in ticks at each checkpoint reached.
  std::vector<std::int64_t> checkpoint_z;
  Occupation occupation;
  /// Empty on success; otherwise the error that stopped the path.
  std::string error;
  bool absorbed = false;

  bool ok() const noexcept { return error.empty(); }
};

/// Runs one path until the stop criterion. AbsorbingState stops the run and
/// is reported through `error`/`absorbed`; InvalidEvent propagates.
PathSummary simulate(const RateModel& model, const LobState& initial, const SimulationOptions& options, Rng& rng,
                     std::span<EventSink* const> sinks = {});

using SinkFactory = std::function<std::vector<std::unique_ptr<EventSink>>(std::uint64_t path)>;

/// Independent paths; path k uses make_path_rng(base_seed, k). Results do not
/// depend on the number of worker threads (0 = default, see worker_count()).
/// Errors are stored per path.
std::vector<PathSummary> batch_simulate(const RateModel& model, const LobState& initial, std::uint64_t n_paths,
                                        const SimulationOptions& options, std::uint64_t base_seed,
                                        unsigned threads = 0, const SinkFactory& sinks = {});

}  // namespace lob
