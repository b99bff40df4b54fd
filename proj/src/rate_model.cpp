#include "lob/rate_model.hpp"

#include <cmath>
#include <string>

namespace lob {

bool pure_jump_allowed(const BookView& v, int i, Direction dir, QueueSize n) noexcept {
  if (n < 1) return false;
  const QueueSize before = v.q[i];
  const QueueSize after = dir == Direction::Insert ? before + n : before - n;
  if ((before > 0 && after < 0) || (before < 0 && after > 0)) return false;
  // An ask entry must not sit left of any bid entry (and vice versa). The other
  // entries are unchanged, so the current best quotes decide.
  if (after > 0) return v.best_bid < i;
  if (after < 0) return v.best_ask > i;
  return true;
}

double effective_rate(const RateModel& model, Direction dir, int i, const BookView& v, QueueSize n) {
  if (!pure_jump_allowed(v, i, dir, n)) return 0.0;
  const double r = model.rate(dir, i, v, n);
  if (r <= 0.0) return 0.0;
  if (!model.restricts_space()) return r;
  OrderBookState target = v.q;
  target.at_index(i) += dir == Direction::Insert ? n : -n;
  return model.admits(target) ? r : 0.0;
}

double star_rate(const RateModel& model, Direction dir, int i, const BookView& v) {
  double s = 0.0;
  const QueueSize nmax = model.max_jump_size(dir, i, v);
  for (QueueSize n = 1; n <= nmax; ++n) s += effective_rate(model, dir, i, v, n);
  return s;
}

double pure_jump_rate(const RateModel& model, const BookView& v) {
  const int K = v.K();
  double s = 0.0;
  for (int slot = 0; slot < 2 * K; ++slot) {
    const int i = index_of_slot(slot, K);
    // Same summation order as enumerate_transitions, so both totals agree bit for bit.
    for (Direction dir : {Direction::Insert, Direction::Deplete}) {
      const QueueSize nmax = model.max_jump_size(dir, i, v);
      for (QueueSize n = 1; n <= nmax; ++n) s += effective_rate(model, dir, i, v, n);
    }
  }
  return s;
}

double total_rate(const RateModel& model, const OrderBookState& q) {
  const BookView v(q);
  const double total = pure_jump_rate(model, v) + model.up_rate(v) + model.down_rate(v);
  if (!(total > 0.0)) throw AbsorbingState("all outgoing rates vanish at state " + q.to_string());
  return total;
}

void enumerate_transitions(const RateModel& model, const BookView& v, std::vector<Transition>& out,
                           bool include_price_moves) {
  const int K = v.K();
  const bool restricted_check = model.restricts_space();
  OrderBookState scratch;
  for (int slot = 0; slot < 2 * K; ++slot) {
    const int i = index_of_slot(slot, K);
    for (Direction dir : {Direction::Insert, Direction::Deplete}) {
      const QueueSize nmax = model.max_jump_size(dir, i, v);
      for (QueueSize n = 1; n <= nmax; ++n) {
        if (!pure_jump_allowed(v, i, dir, n)) continue;
        const double r = model.rate(dir, i, v, n);
        if (!(r > 0.0)) continue;
        if (restricted_check) {
          scratch = v.q;
          scratch.at_index(i) += dir == Direction::Insert ? n : -n;
          if (!model.admits(scratch)) continue;
        }
        out.push_back({dir == Direction::Insert ? Event::increase(i, n) : Event::decrease(i, n), r});
      }
    }
  }
  if (include_price_moves) {
    const double u = model.up_rate(v);
    if (u > 0.0) out.push_back({Event::price_up(), u});
    const double d = model.down_rate(v);
    if (d > 0.0) out.push_back({Event::price_down(), d});
  }
}

std::vector<Transition> enumerate_transitions(const RateModel& model, const OrderBookState& q,
                                              bool include_price_moves) {
  std::vector<Transition> out;
  enumerate_transitions(model, BookView(q), out, include_price_moves);
  return out;
}

GeneratingFunction generating_function(const RateModel& model, int i, const BookView& v, Direction dir, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("generating function argument must be positive");
  if (z > model.size_radius())
    throw RadiusExceeded("z = " + std::to_string(z) + " exceeds the declared radius " +
                         std::to_string(model.size_radius()));
  GeneratingFunction g;
  const QueueSize nmax = model.max_jump_size(dir, i, v);
  double weighted_z = 0.0;
  double weighted_inv = 0.0;
  for (QueueSize n = 1; n <= nmax; ++n) {
    const double r = effective_rate(model, dir, i, v, n);
    if (r == 0.0) continue;
    const double zn = std::pow(z, static_cast<double>(n));
    g.star_rate += r;
    weighted_z += r * zn;
    weighted_inv += r / zn;
  }
  if (g.star_rate > 0.0) {
    g.at_z = weighted_z / g.star_rate;
    g.at_inv_z = weighted_inv / g.star_rate;
  }
  return g;
}

GeneratingFunction generating_function(const RateModel& model, int i, const OrderBookState& q, Direction dir,
                                       double z) {
  return generating_function(model, i, BookView(q), dir, z);
}

double lyapunov(std::span<const QueueSize> slots, double z, double U) {
  double s = 0.0;
  for (QueueSize v : slots) s += std::pow(z, static_cast<double>(v < 0 ? -v : v) - U);
  return s;
}

}  // namespace lob
