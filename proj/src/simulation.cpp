#include "lob/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include "lob/parallel.hpp"

namespace lob {

void shift_up(OrderBookState& q, QueueSize l) noexcept {
  auto s = q.mutable_slots();
  std::move(s.begin() + 1, s.end(), s.begin());
  s.back() = l;
}

void shift_down(OrderBookState& q, QueueSize l) noexcept {
  auto s = q.mutable_slots();
  std::move_backward(s.begin(), s.end() - 1, s.end());
  s.front() = l;
}

std::pair<double, Event> sample_next(const RateModel& model, const BookView& v, Rng& rng,
                                     std::vector<Transition>& scratch) {
  scratch.clear();
  enumerate_transitions(model, v, scratch, true);
  double total = 0.0;
  for (const auto& tr : scratch) total += tr.rate;
  if (!(total > 0.0)) throw AbsorbingState("all outgoing rates vanish at state " + v.q.to_string());
  const double tau = exponential(rng, total);
  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (const auto& tr : scratch) {
    acc += tr.rate;
    if (target < acc) return {tau, tr.event};
  }
  return {tau, scratch.back().event};
}

std::pair<double, Event> sample_next(const RateModel& model, const OrderBookState& q, Rng& rng) {
  std::vector<Transition> scratch;
  return sample_next(model, BookView(q), rng, scratch);
}

Event apply_event_inplace(const RateModel& model, LobState& state, const Event& event, Rng& rng) {
  OrderBookState& q = state.book;
  const int K = q.depth();
  Event out = event;
  switch (event.kind) {
    case EventKind::Increase:
    case EventKind::Decrease: {
      const int i = event.index;
      if (i == 0 || i < -K || i > K || event.size < 1)
        throw InvalidEvent("malformed pure jump at index " + std::to_string(i));
      const Direction dir = event.kind == EventKind::Increase ? Direction::Insert : Direction::Deplete;
      if (!pure_jump_allowed(BookView(q), i, dir, event.size))
        throw InvalidEvent(std::string(to_string(event.kind)) + "(" + std::to_string(i) + ", " +
                           std::to_string(event.size) + ") leaves the state space from " + q.to_string());
      const QueueSize delta = dir == Direction::Insert ? event.size : -event.size;
      q.at_index(i) += delta;
      if (model.restricts_space() && !model.admits(q)) {
        q.at_index(i) -= delta;
        throw InvalidEvent(std::string(to_string(event.kind)) + "(" + std::to_string(i) +
                           ") leaves the model's restricted space from " + q.to_string());
      }
      out.mode = PriceMoveMode::None;
      out.fill = 0;
      return out;
    }
    case EventKind::PriceUp:
    case EventKind::PriceDown: {
      const bool up = event.kind == EventKind::PriceUp;
      if (event.mode == PriceMoveMode::Shift) {
        if (up)
          shift_up(q, event.fill);
        else
          shift_down(q, event.fill);
        if (!in_state_space(q.slots()) || (model.restricts_space() && !model.admits(q)))
          throw InvalidEvent("boundary fill " + std::to_string(event.fill) + " leaves the state space: " + q.to_string());
        state.p_ref.half_ticks += up ? 2 : -2;
        return out;
      }
      if (event.mode == PriceMoveMode::Reinit) throw InvalidEvent("a redraw cannot be replayed without its book");
      const bool reinit = uniform01(rng) < model.reinit_probability();
      if (reinit) {
        (up ? model.reinit_after_up() : model.reinit_after_down()).sample(rng, q);
        out.mode = PriceMoveMode::Reinit;
        out.fill = 0;
      } else {
        const QueueSize l = (up ? model.upper_fill() : model.lower_fill()).sample(rng);
        if (up)
          shift_up(q, l);
        else
          shift_down(q, l);
        out.mode = PriceMoveMode::Shift;
        out.fill = l;
      }
      state.p_ref.half_ticks += up ? 2 : -2;
      return out;
    }
  }
  throw InvalidEvent("unknown event kind");
}

LobState apply_event(const RateModel& model, const LobState& state, const Event& event, Rng& rng) {
  LobState next = state;
  apply_event_inplace(model, next, event, rng);
  return next;
}

void append_double(std::string& s, double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  s.append(buf, res.ptr);
}

namespace {

void append_int(std::string& s, long long x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  s.append(buf, res.ptr);
}

}  // namespace

CsvEventSink::CsvEventSink(std::ostream& out, const BookParams& book, std::uint64_t state_every,
                           std::string header_comment)
    : out_(out), book_(book), state_every_(state_every) {
  if (!header_comment.empty()) {
    std::size_t start = 0;
    while (start < header_comment.size()) {
      const auto end = header_comment.find('\n', start);
      out_ << "# " << header_comment.substr(start, end - start) << '\n';
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  out_ << "seq,t,tau,kind,index,size,c,p_ref";
  if (state_every_ > 0)
    for (int s = 0; s < 2 * book_.K; ++s) out_ << ",q_" << index_of_slot(s, book_.K);
  out_ << '\n';
}

void CsvEventSink::on_event(const EventRecord& r) {
  line_.clear();
  append_int(line_, static_cast<long long>(r.seq));
  line_ += ',';
  append_double(line_, r.t);
  line_ += ',';
  append_double(line_, r.tau);
  line_ += ',';
  line_ += to_string(r.event.kind);
  line_ += ',';
  int index = r.event.index;
  QueueSize size = r.event.size;
  if (r.event.is_price_move()) {
    if (r.event.mode == PriceMoveMode::Shift) {
      index = r.event.kind == EventKind::PriceUp ? book_.K : -book_.K;
      size = r.event.fill;
    } else {
      index = 0;
      size = 0;
    }
  }
  append_int(line_, index);
  line_ += ',';
  append_int(line_, size);
  line_ += ',';
  append_double(line_, r.c_ticks * book_.tick);
  line_ += ',';
  append_double(line_, r.p_ref.value(book_.tick));
  if (state_every_ > 0) {
    const bool full = r.post != nullptr && r.seq % state_every_ == 0;
    for (int s = 0; s < 2 * book_.K; ++s) {
      line_ += ',';
      if (full) append_int(line_, r.post->slots()[static_cast<std::size_t>(s)]);
    }
  }
  line_ += '\n';
  out_ << line_;
}

void CsvEventSink::finish() { out_.flush(); }

PathSummary simulate(const RateModel& model, const LobState& initial, const SimulationOptions& options, Rng& rng,
                     std::span<EventSink* const> sinks) {
  if (initial.book.depth() != model.book().K)
    throw std::invalid_argument("initial book depth does not match the model");
  validate_state(initial.book.slots());
  if (!initial.p_ref.on_reference_grid()) throw std::invalid_argument("reference price must lie on alpha(0.5 + Z)");

  PathSummary s;
  LobState state = initial;
  std::vector<Transition> buf;
  buf.reserve(static_cast<std::size_t>(8 * model.book().K + 2));

  try {
    for (std::uint64_t k = 0; k < options.burn_in_events; ++k) {
      const BookView v(state.book);
      const auto [tau, ev] = sample_next(model, v, rng, buf);
      apply_event_inplace(model, state, ev, rng);
    }
  } catch (const AbsorbingState& e) {
    s.initial = state;
    s.final_state = state;
    s.error = e.what();
    s.absorbed = true;
    return s;
  }

  s.initial = state;
  const StopCriterion& stop = options.stop;
  if (options.record_embedded && stop.max_events != std::numeric_limits<std::uint64_t>::max()) {
    const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(stop.max_events, 200'000'000));
    s.c_ticks.reserve(n);
    s.tau.reserve(n);
  }
  const auto& cps = options.checkpoints;
  std::size_t next_cp = 0;
  double t = 0.0;
  std::int64_t z = 0;
  EventRecord rec;

  try {
    while (s.events < stop.max_events) {
      const BookView v(state.book);
      const auto [tau, ev] = sample_next(model, v, rng, buf);
      if (t + tau > stop.max_time) {
        if (options.record_occupation) s.occupation[state.book] += stop.max_time - t;
        t = stop.max_time;
        while (next_cp < cps.size() && cps[next_cp] <= t) {
          s.checkpoint_z.push_back(z);
          ++next_cp;
        }
        break;
      }
      while (next_cp < cps.size() && t + tau > cps[next_cp]) {
        s.checkpoint_z.push_back(z);
        ++next_cp;
      }
      if (options.record_occupation) s.occupation[state.book] += tau;
      const Event resolved = apply_event_inplace(model, state, ev, rng);
      t += tau;
      ++s.events;
      int c = 0;
      if (resolved.kind == EventKind::PriceUp) {
        c = 1;
        ++s.up_moves;
      } else if (resolved.kind == EventKind::PriceDown) {
        c = -1;
        ++s.down_moves;
      }
      z += c;
      s.sum_tau += tau;
      s.sum_tau_sq += tau * tau;
      if (options.record_embedded) {
        s.c_ticks.push_back(static_cast<std::int8_t>(c));
        s.tau.push_back(tau);
      }
      if (!sinks.empty()) {
        rec.seq = s.events;
        rec.t = t;
        rec.tau = tau;
        rec.event = resolved;
        rec.c_ticks = c;
        rec.p_ref = state.p_ref;
        rec.post = &state.book;
        for (EventSink* sink : sinks) sink->on_event(rec);
      }
    }
  } catch (const AbsorbingState& e) {
    s.error = e.what();
    s.absorbed = true;
  }

  if (options.record_occupation && s.occupation.empty()) s.occupation.emplace(s.initial.book, 0.0);
  s.elapsed = t;
  s.z_ticks = z;
  s.final_state = state;
  for (EventSink* sink : sinks) sink->finish();
  return s;
}

std::vector<PathSummary> batch_simulate(const RateModel& model, const LobState& initial, std::uint64_t n_paths,
                                        const SimulationOptions& options, std::uint64_t base_seed, unsigned threads,
                                        const SinkFactory& sinks) {
  if (n_paths < 1) throw std::invalid_argument("n_paths >= 1 required");
  std::vector<PathSummary> out(static_cast<std::size_t>(n_paths));
  parallel_for(out.size(), threads, [&](std::size_t k) {
    Rng rng = make_path_rng(base_seed, k);
    std::vector<std::unique_ptr<EventSink>> owned;
    if (sinks) owned = sinks(k);
    std::vector<EventSink*> ptrs;
    for (auto& p : owned) ptrs.push_back(p.get());
    try {
      out[k] = simulate(model, initial, options, rng, ptrs);
    } catch (const std::exception& e) {
      out[k] = PathSummary{};
      out[k].initial = initial;
      out[k].final_state = initial;
      out[k].error = e.what();
    }
    out[k].path = k;
  });
  return out;
}

}  // namespace lob
