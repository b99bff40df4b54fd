#pragma once

#include <limits>
#include <memory>
#include <string_view>
#include <vector>

#include "lob/core.hpp"
#include "lob/distributions.hpp"

namespace lob {

/// A book together with its best-quote indices, computed once per state so
/// that rate functions do not rescan the vector.
struct BookView {
  const OrderBookState& q;
  int best_bid;
  int best_ask;

  explicit BookView(const OrderBookState& state)
      : q(state), best_bid(best_bid_index(state)), best_ask(best_ask_index(state)) {}
  BookView(const OrderBookState& state, int bid, int ask) : q(state), best_bid(bid), best_ask(ask) {}

  int K() const noexcept { return q.depth(); }
};

/// Insert: q_i -> q_i + n (rate f_i). Deplete: q_i -> q_i - n (rate g_i).
enum class Direction : std::uint8_t { Insert, Deplete };

/// The ingredients of the generator: pure-jump rates f_i(q, n) and g_i(q, n),
/// price-move rates u(q) and d(q), the reinitialisation probability, and the
/// four boundary/reinitialisation laws.
///
/// Rates may be stated without regard to the state space: the free functions
/// below drop every jump whose target leaves the space or reverses the sign of
/// a queue. Implementations are immutable and safe to share between threads.
class RateModel {
 public:
  virtual ~RateModel() = default;

  virtual std::string_view name() const = 0;
  virtual const BookParams& book() const = 0;

  /// f_i(q, n) for Direction::Insert, g_i(q, n) for Direction::Deplete.
  virtual double rate(Direction dir, int i, const BookView& v, QueueSize n) const = 0;
  /// Largest jump size with a possibly nonzero rate (finite support).
  virtual QueueSize max_jump_size(Direction, int /*i*/, const BookView&) const { return 1; }
  /// Convergence radius z* of the jump-size generating functions.
  virtual double size_radius() const { return std::numeric_limits<double>::infinity(); }

  virtual double up_rate(const BookView& v) const = 0;
  virtual double down_rate(const BookView& v) const = 0;

  virtual double reinit_probability() const = 0;
  virtual const BoundaryDistribution& upper_fill() const = 0;
  virtual const BoundaryDistribution& lower_fill() const = 0;
  virtual const BookDistribution& reinit_after_up() const = 0;
  virtual const BookDistribution& reinit_after_down() const = 0;

  /// Extra restriction of the state space beyond sign admissibility (e.g. the
  /// queue-reactive model lives on bids-left / asks-right books only).
  virtual bool admits(const OrderBookState&) const { return true; }
  virtual bool restricts_space() const { return false; }

  double f(int i, const BookView& v, QueueSize n) const { return rate(Direction::Insert, i, v, n); }
  double g(int i, const BookView& v, QueueSize n) const { return rate(Direction::Deplete, i, v, n); }
};

/// True when q +- n e_i stays in the space and q_i does not change sign.
bool pure_jump_allowed(const BookView& v, int i, Direction dir, QueueSize n) noexcept;

/// Rate with the state-space restriction applied (zero for disallowed jumps).
double effective_rate(const RateModel& model, Direction dir, int i, const BookView& v, QueueSize n);

/// f_i*(q) or g_i*(q): sum over jump sizes of the effective rates.
double star_rate(const RateModel& model, Direction dir, int i, const BookView& v);

/// Sum of all pure-jump rates at q.
double pure_jump_rate(const RateModel& model, const BookView& v);

/// Sum of all outgoing rates including price moves. Throws AbsorbingState when zero.
double total_rate(const RateModel& model, const OrderBookState& q);

struct Transition {
  Event event;
  double rate = 0.0;
};

/// Appends every transition with positive rate. Price moves are included as
/// unresolved PriceUp/PriceDown templates unless `include_price_moves` is false.
void enumerate_transitions(const RateModel& model, const BookView& v, std::vector<Transition>& out,
                           bool include_price_moves = true);
std::vector<Transition> enumerate_transitions(const RateModel& model, const OrderBookState& q,
                                              bool include_price_moves = true);

/// Size generating functions at (i, q) in one direction.
struct GeneratingFunction {
  double at_z = 0.0;       // G(z)   = sum_n z^n  l(n)
  double at_inv_z = 0.0;   // G(1/z) = sum_n z^-n l(n)
  double star_rate = 0.0;  // f_i* or g_i*
};

/// Uses the 0/0 = 0 convention: G = 0 when the star rate vanishes.
/// Throws RadiusExceeded when z exceeds the model's declared radius.
GeneratingFunction generating_function(const RateModel& model, int i, const BookView& v, Direction dir, double z);
GeneratingFunction generating_function(const RateModel& model, int i, const OrderBookState& q, Direction dir,
                                       double z);

/// Lyapunov function sum_i z^(|q_i| - U).
double lyapunov(std::span<const QueueSize> slots, double z, double U);
inline double lyapunov(const OrderBookState& q, double z, double U) { return lyapunov(q.slots(), z, U); }

}  // namespace lob
