#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "lob/models.hpp"
#include "lob/simulation.hpp"
#include "lob/statistics.hpp"
#include "toy_model.hpp"

using namespace lob;

namespace {

PoissonK1Model k1(double theta = 1.0) {
  PoissonK1Params p;
  p.lambda = 1.0;
  p.mu = 2.0;
  p.theta = theta;
  return PoissonK1Model(p);
}

LobState start(std::initializer_list<QueueSize> q) { return {validate_state(q), Price{1}}; }

struct Recorder final : EventSink {
  std::vector<EventRecord> records;
  std::vector<OrderBookState> posts;
  void on_event(const EventRecord& r) override {
    records.push_back(r);
    posts.push_back(*r.post);
  }
};

}  // namespace

TEST_CASE("sampling a single transition") {
  const double R = 2.5;
  test::ToyModel m(1, [R](Direction d, int i, const BookView&, QueueSize) {
    return d == Direction::Insert && i == 1 ? R : 0.0;
  });
  const auto q = validate_state({0, 0});
  Rng rng = make_path_rng(1, 0);
  const int n = 100'000;
  std::vector<double> taus;
  for (int k = 0; k < n; ++k) {
    const auto [tau, ev] = sample_next(m, q, rng);
    REQUIRE(ev == Event::increase(1, 1));
    taus.push_back(tau);
  }
  const auto est = mean_iid(taus);
  CHECK(std::abs(est.mean - 1.0 / R) <= 3.0 * est.se);
}

TEST_CASE("event frequencies follow the rate table") {
  const auto m = k1(0.5);
  const auto q = validate_state({-2, 3});
  Rng rng = make_path_rng(2, 0);
  const int n = 100'000;
  std::map<std::pair<int, int>, int> counts;
  for (int k = 0; k < n; ++k) {
    const auto ev = sample_next(m, q, rng).second;
    ++counts[{static_cast<int>(ev.kind), ev.index}];
  }
  const std::map<std::pair<int, int>, double> expected = {
      {{static_cast<int>(EventKind::Increase), 1}, 1.0 / 6},
      {{static_cast<int>(EventKind::Decrease), 1}, 2.0 / 6},
      {{static_cast<int>(EventKind::Increase), -1}, 2.0 / 6},
      {{static_cast<int>(EventKind::Decrease), -1}, 1.0 / 6},
  };
  CHECK(counts.size() == 4);
  for (const auto& [key, p] : expected) {
    const double f = counts[key] / static_cast<double>(n);
    CHECK(std::abs(f - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST_CASE("waiting times at a fixed state are exponential") {
  const ZeroIntelligenceModel m(ZeroIntelligenceParams::defaults(2));
  const auto q = validate_state({-3, -1, 0, 2});
  Rng rng = make_path_rng(3, 0);
  std::vector<double> taus;
  std::vector<Transition> scratch;
  for (int k = 0; k < 20'000; ++k) taus.push_back(sample_next(m, BookView(q), rng, scratch).first);
  CHECK(ks_exponential(taus, total_rate(m, q)).pvalue > 0.01);
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  const auto q = validate_state({-1, -2, 1, 0});
  Rng a = make_path_rng(4, 0), b = make_path_rng(4, 0);
  for (int k = 0; k < 1000; ++k) {
    const auto x = sample_next(m, q, a), y = sample_next(m, q, b);
    REQUIRE(x.first == y.first);
    REQUIRE(x.second == y.second);
  }
}

TEST_CASE("frame shifts") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  Rng rng = make_path_rng(5, 0);
  const LobState s{validate_state({-5, -2, 1, 3}), Price{21}};

  Event up = Event::price_up();
  up.mode = PriceMoveMode::Shift;
  up.fill = 4;
  const auto u = apply_event(m, s, up, rng);
  CHECK(u.book == validate_state({-2, 1, 3, 4}));
  CHECK(u.p_ref.half_ticks == 23);

  Event down = Event::price_down();
  down.mode = PriceMoveMode::Shift;
  down.fill = -7;
  const auto d = apply_event(m, s, down, rng);
  CHECK(d.book == validate_state({-7, -5, -2, 1}));
  CHECK(d.p_ref.half_ticks == 19);

  CHECK_THROWS_AS(apply_event(m, s, Event::decrease(1, 2), rng), InvalidEvent);
  CHECK_THROWS_AS(apply_event(m, s, Event::increase(0, 1), rng), InvalidEvent);
}

TEST_CASE("an empty run") {
  const auto m = k1();
  SimulationOptions opt;
  opt.stop.max_events = 0;
  opt.record_embedded = true;
  opt.record_occupation = true;
  Rng rng = make_path_rng(6, 0);
  const auto init = start({-1, 2});
  const auto p = simulate(m, init, opt, rng);
  CHECK(p.ok());
  CHECK(p.events == 0);
  CHECK(p.z_ticks == 0);
  CHECK(p.c_ticks.empty());
  REQUIRE(p.occupation.size() == 1);
  CHECK(p.occupation.count(init.book) == 1);
}

TEST_CASE("records are consistent with the path") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  Recorder rec;
  EventSink* sinks[] = {&rec};
  SimulationOptions opt;
  opt.stop.max_events = 20'000;
  opt.record_embedded = true;
  Rng rng = make_path_rng(7, 0);
  const auto init = start({-1, 0, 0, 1});
  const auto p = simulate(m, init, opt, rng, sinks);
  REQUIRE(rec.records.size() == 20'000);
  double t = 0.0;
  std::int64_t z = 0;
  Price last = init.p_ref;
  for (std::size_t k = 0; k < rec.records.size(); ++k) {
    const auto& r = rec.records[k];
    CHECK(r.seq == k + 1);
    CHECK(r.tau > 0.0);
    t += r.tau;
    CHECK(r.t == t);
    CHECK(2 * r.c_ticks == r.p_ref.half_ticks - last.half_ticks);
    CHECK((r.c_ticks != 0) == r.event.is_price_move());
    CHECK(p.c_ticks[k] == r.c_ticks);
    CHECK(p.tau[k] == r.tau);
    z += r.c_ticks;
    last = r.p_ref;
  }
  CHECK(p.z_ticks == z);
  CHECK(2 * p.z_ticks == p.final_state.p_ref.half_ticks - init.p_ref.half_ticks);
  CHECK(p.final_state.book == rec.posts.back());
  CHECK(p.up_moves + p.down_moves > 0);
}

TEST_CASE("checkpoints record Z at calendar times") {
  const auto m = k1();
  Recorder rec;
  EventSink* sinks[] = {&rec};
  SimulationOptions opt;
  opt.stop.max_time = 500.0;
  opt.checkpoints = {1.0, 10.0, 250.0, 500.0};
  Rng rng = make_path_rng(8, 0);
  const auto p = simulate(m, start({0, 0}), opt, rng, sinks);
  REQUIRE(p.checkpoint_z.size() == 4);
  CHECK(p.elapsed == 500.0);
  for (std::size_t c = 0; c < 4; ++c) {
    std::int64_t z = 0;
    for (const auto& r : rec.records)
      if (r.t <= opt.checkpoints[c]) z += r.c_ticks;
    CHECK(p.checkpoint_z[c] == z);
  }
}

TEST_CASE("event count and calendar time agree over long runs") {
  const ZeroIntelligenceModel m(ZeroIntelligenceParams::defaults(2));
  SimulationOptions opt;
  opt.stop.max_time = 50'000.0;
  Rng rng = make_path_rng(9, 0);
  const auto p = simulate(m, start({0, 0, 0, 0}), opt, rng);
  REQUIRE(p.events > 10'000);
  const double n = static_cast<double>(p.events);
  CHECK(n / p.elapsed * (p.sum_tau / n) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("burn-in restarts the clock and the price origin") {
  const auto m = k1();
  SimulationOptions opt;
  opt.stop.max_events = 100;
  opt.burn_in_events = 5000;
  Rng rng = make_path_rng(10, 0);
  const auto p = simulate(m, start({0, 0}), opt, rng);
  CHECK(p.events == 100);
  CHECK(p.elapsed == doctest::Approx(p.sum_tau));
  CHECK(2 * p.z_ticks == p.final_state.p_ref.half_ticks - p.initial.p_ref.half_ticks);
}

TEST_CASE("absorbing states stop the path") {
  test::ToyModel m(1, [](Direction d, int i, const BookView& v, QueueSize) {
    return d == Direction::Insert && i == 1 && v.q[1] < 3 ? 1.0 : 0.0;
  });
  SimulationOptions opt;
  opt.stop.max_events = 100;
  Rng rng = make_path_rng(11, 0);
  const auto p = simulate(m, start({0, 0}), opt, rng);
  CHECK_FALSE(p.ok());
  CHECK(p.absorbed);
  CHECK(p.events == 3);
  CHECK(p.final_state.book == validate_state({0, 3}));
}

TEST_CASE("symmetric model has no drift") {
  const auto m = k1();
  SimulationOptions opt;
  opt.stop.max_events = 1'000'000;
  opt.burn_in_events = 100'000;
  opt.record_embedded = true;
  Rng rng = make_path_rng(12, 0);
  const auto p = simulate(m, start({0, 0}), opt, rng);
  const std::vector<double> c(p.c_ticks.begin(), p.c_ticks.end());
  const auto est = mean_batch(c, 1000);
  CHECK(std::abs(est.mean) <= 3.0 * est.se);
}

TEST_CASE("event logs") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  auto run = [&](std::uint64_t every) {
    std::ostringstream out;
    CsvEventSink sink(out, m.book(), every, "first\nsecond");
    EventSink* sinks[] = {&sink};
    SimulationOptions opt;
    opt.stop.max_events = 2000;
    Rng rng = make_path_rng(13, 0);
    simulate(m, start({0, 0, 0, 0}), opt, rng, sinks);
    return out.str();
  };
  const std::string a = run(1);
  CHECK(a == run(1));
  CHECK(a.rfind("# first\n# second\nseq,t,tau,kind,index,size,c,p_ref,q_-2,q_-1,q_1,q_2\n", 0) == 0);
  std::istringstream in(a);
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#' && line[0] != 's') ++rows;
  CHECK(rows == 2000);

  // With elision only every third row carries the queues.
  std::istringstream elided(run(3));
  std::getline(elided, line);
  std::getline(elided, line);
  std::getline(elided, line);
  std::getline(elided, line);  // seq 1
  CHECK(line.substr(line.size() - 4) == ",,,,");
  std::getline(elided, line);
  std::getline(elided, line);  // seq 3
  CHECK(line.back() != ',');
}

TEST_CASE("batches") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  SimulationOptions opt;
  opt.stop.max_events = 5000;
  const auto init = start({0, 0, 0, 0});

  SUBCASE("one path equals simulate with the derived seed") {
    const auto b = batch_simulate(m, init, 1, opt, 77, 1);
    Rng rng = make_path_rng(77, 0);
    const auto s = simulate(m, init, opt, rng);
    CHECK(b[0].final_state == s.final_state);
    CHECK(b[0].elapsed == s.elapsed);
    CHECK(b[0].z_ticks == s.z_ticks);
  }
  SUBCASE("thread count does not change results") {
    const auto a = batch_simulate(m, init, 16, opt, 78, 1);
    const auto b = batch_simulate(m, init, 16, opt, 78, 4);
    for (std::size_t k = 0; k < 16; ++k) {
      CHECK(a[k].path == k);
      CHECK(a[k].final_state == b[k].final_state);
      CHECK(a[k].elapsed == b[k].elapsed);
      CHECK(a[k].sum_tau == b[k].sum_tau);
    }
  }
  SUBCASE("terminal Z is centred across paths") {
    const auto paths = batch_simulate(m, init, 100, opt, 79);
    std::vector<double> z;
    for (const auto& p : paths) z.push_back(static_cast<double>(p.z_ticks));
    const auto est = mean_iid(z);
    CHECK(std::abs(est.mean) <= 3.0 * est.se);
  }
}
