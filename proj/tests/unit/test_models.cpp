#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lob/models.hpp"
#include "lob/scan.hpp"
#include "lob/simulation.hpp"
#include "toy_model.hpp"

using namespace lob;

namespace {

PoissonK1Model k1(double lambda, double mu, double theta) {
  PoissonK1Params p;
  p.lambda = lambda;
  p.mu = mu;
  p.theta = theta;
  return PoissonK1Model(p);
}

bool mentions(const ConstraintReport& r, const std::string& text) {
  return std::any_of(r.begin(), r.end(), [&](const ConstraintViolation& v) { return v.constraint == text; });
}

std::vector<std::shared_ptr<const RateModel>> zoo() {
  PoissonK1Params p;
  return {std::make_shared<PoissonK1Model>(p), std::make_shared<PoissonKModel>(PoissonKParams::defaults(2)),
          std::make_shared<PoissonKModel>(PoissonKParams::defaults(3)),
          std::make_shared<ZeroIntelligenceModel>(ZeroIntelligenceParams::defaults(2)),
          std::make_shared<QueueReactiveModel>(QueueReactiveParams::defaults(2)),
          with_mid_chasing(std::make_shared<PoissonKModel>(PoissonKParams::defaults(2)), 0.1, 0.5)};
}

}  // namespace

TEST_CASE("total rate of the two-limit Poisson model") {
  const auto m = k1(1.0, 2.0, 0.5);
  CHECK(total_rate(m, validate_state({-2, 3})) == doctest::Approx(6.0));
  // u fires because q_1 = 0.
  CHECK(total_rate(m, validate_state({-2, 0})) == doctest::Approx(4.5));
}

TEST_CASE("absorbing state") {
  test::ToyModel dead(1, [](Direction, int, const BookView&, QueueSize) { return 0.0; });
  CHECK_THROWS_AS(total_rate(dead, validate_state({0, 0})), AbsorbingState);
}

TEST_CASE("enumerate transitions") {
  SUBCASE("two-limit Poisson") {
    const auto tr = enumerate_transitions(k1(1.0, 2.0, 0.5), validate_state({-2, 3}));
    CHECK(tr.size() == 4);
    for (const auto& t : tr) CHECK(t.event.size == 1);
  }
  SUBCASE("queue-reactive at the empty book") {
    QueueReactiveParams p;
    p.K = 1;
    p.lambda = {{0.8, 0.5}};
    p.mu = {{0.0, 1.0}};
    p.theta = 0.3;
    const QueueReactiveModel m(p);
    const auto tr = enumerate_transitions(m, validate_state({0, 0}));
    auto find = [&](const Event& e) {
      return std::find_if(tr.begin(), tr.end(), [&](const Transition& t) { return t.event == e; });
    };
    REQUIRE(find(Event::increase(1, 1)) != tr.end());
    CHECK(find(Event::increase(1, 1))->rate == doctest::Approx(0.8));
    REQUIRE(find(Event::price_up()) != tr.end());
    REQUIRE(find(Event::price_down()) != tr.end());
    CHECK(find(Event::price_up())->rate == doctest::Approx(0.3));
    CHECK(find(Event::price_down())->rate == doctest::Approx(0.3));
  }
  SUBCASE("zero-intelligence: no cancellation from an empty ask queue") {
    const ZeroIntelligenceModel m(ZeroIntelligenceParams::defaults(2));
    const auto q = validate_state({-1, 0, 2, 0});
    for (const auto& t : enumerate_transitions(m, q)) CHECK_FALSE(t.event == Event::decrease(2, 1));
    // The nonempty ask queue can be cancelled.
    const auto tr = enumerate_transitions(m, q);
    CHECK(std::any_of(tr.begin(), tr.end(), [](const Transition& t) { return t.event == Event::decrease(1, 1); }));
  }
  SUBCASE("size-2 depletion of a queue of one is never emitted") {
    test::ToyModel m(2, [](Direction, int, const BookView&, QueueSize) { return 1.0; }, 2);
    for (const auto& t : enumerate_transitions(m, validate_state({-5, -2, 1, 3})))
      CHECK_FALSE(t.event == Event::decrease(1, 2));
  }
}

TEST_CASE("parameter validation") {
  SUBCASE("lambda above mu") {
    PoissonK1Params p;
    p.lambda = 2.0;
    p.mu = 1.0;
    const auto r = validate_params(p);
    CHECK(mentions(r, "λ < μ required"));
    CHECK_FALSE(has_structural(r));
  }
  SUBCASE("theta decreasing") {
    auto p = PoissonKParams::defaults(2);
    p.theta[static_cast<std::size_t>(slot_of(1, 2))] = 0.3;
    p.theta[static_cast<std::size_t>(slot_of(2, 2))] = 0.1;
    CHECK(mentions(validate_params(p), "θ_i nondecreasing"));
  }
  SUBCASE("queue-reactive cancellation at an empty queue") {
    auto p = QueueReactiveParams::defaults(2);
    p.mu[0][0] = 0.2;
    const auto r = validate_params(p);
    CHECK(mentions(r, "μ(0)=0 required"));
    CHECK(has_structural(r));
    CHECK_THROWS_AS(QueueReactiveModel{p}, std::invalid_argument);
  }
  SUBCASE("zoo defaults are clean") {
    CHECK(validate_params(PoissonK1Params{}).empty());
    for (int K = 1; K <= 4; ++K) {
      CHECK(validate_params(PoissonKParams::defaults(K)).empty());
      CHECK(validate_params(ZeroIntelligenceParams::defaults(K)).empty());
      CHECK(validate_params(QueueReactiveParams::defaults(K)).empty());
    }
  }
  SUBCASE("negative rates are structural") {
    auto p = PoissonKParams::defaults(2);
    p.gamma[0] = -1.0;
    CHECK(has_structural(validate_params(p)));
    auto z = ZeroIntelligenceParams::defaults(2);
    z.mu_by_distance[0] = 0.0;
    CHECK(mentions(validate_params(z), "μ_φ > 0 required"));
  }
}

TEST_CASE("generating function") {
  SUBCASE("size-1 jumps give z") {
    const auto m = k1(1.0, 2.0, 0.5);
    const auto q = validate_state({-2, 3});
    for (double z : {1.05, 1.3, 2.0}) {
      CHECK(generating_function(m, 1, q, Direction::Insert, z).at_z == doctest::Approx(z));
      CHECK(generating_function(m, -1, q, Direction::Insert, z).at_z == doctest::Approx(z));
    }
  }
  SUBCASE("two equally likely sizes") {
    test::ToyModel m(1, [](Direction d, int i, const BookView&, QueueSize n) {
      return d == Direction::Insert && i == 1 && (n == 1 || n == 2) ? 0.5 : 0.0;
    }, 2);
    const auto g = generating_function(m, 1, validate_state({0, 0}), Direction::Insert, 1.1);
    CHECK(g.at_z == doctest::Approx(1.155).epsilon(1e-12));
    CHECK(g.at_inv_z == doctest::Approx(0.5 / 1.1 + 0.5 / 1.21).epsilon(1e-12));
    CHECK(g.star_rate == doctest::Approx(1.0));
  }
  SUBCASE("zero star rate gives zero") {
    const auto g = generating_function(k1(1.0, 2.0, 0.5), 1, validate_state({-1, 0}), Direction::Deplete, 1.2);
    CHECK(g.star_rate == 0.0);
    CHECK(g.at_z == 0.0);
  }
}

TEST_CASE("every enumerated pure jump lands in the state space") {
  for (const auto& m : zoo()) {
    CAPTURE(m->name());
    const auto states = sample_states(*m, 300, 11, 7, 2000);
    REQUIRE(states.size() > 50);
    for (const auto& q : states) {
      for (const auto& t : enumerate_transitions(*m, q, false)) {
        auto s = q.slots();
        std::vector<QueueSize> next(s.begin(), s.end());
        const QueueSize d = t.event.kind == EventKind::Increase ? t.event.size : -t.event.size;
        next[static_cast<std::size_t>(slot_of(t.event.index, q.depth()))] += d;
        CHECK_NOTHROW(validate_state(next));
        CHECK(m->admits(make_unchecked_state(next)));
      }
    }
  }
}

TEST_CASE("total rate equals the sum of the enumerated rates exactly") {
  for (const auto& m : zoo()) {
    CAPTURE(m->name());
    for (const auto& q : sample_states(*m, 300, 12, 7, 2000)) {
      double sum = 0.0;
      for (const auto& t : enumerate_transitions(*m, q)) sum += t.rate;
      CHECK(total_rate(*m, q) == sum);
    }
  }
}

TEST_CASE("rates vanish on disallowed jumps") {
  const ZeroIntelligenceModel m(ZeroIntelligenceParams::defaults(2));
  {
    // An ask order left of the best bid would break the sign pattern.
    const auto q = validate_state({0, -1, 0, 2});
    const BookView v(q);
    CHECK(effective_rate(m, Direction::Insert, -2, v, 1) == 0.0);
    CHECK(effective_rate(m, Direction::Deplete, 2, v, 1) > 0.0);
  }
  {
    // A bid order right of the best ask likewise.
    const auto q = validate_state({-3, 0, 2, 0});
    const BookView v(q);
    CHECK(effective_rate(m, Direction::Deplete, 2, v, 1) == 0.0);
    CHECK(effective_rate(m, Direction::Deplete, 1, v, 1) > 0.0);
  }
}

TEST_CASE("redraw after a price move respects the bid and ask sides") {
  struct Check final : EventSink {
    int moves = 0, bad = 0;
    void on_event(const EventRecord& r) override {
      if (!r.event.is_price_move()) return;
      ++moves;
      if ((*r.post)[-1] > 0 || (*r.post)[1] < 0) ++bad;
      if (r.event.mode != PriceMoveMode::Reinit) ++bad;
    }
  } sink;
  PoissonK1Params p;
  p.theta = 2.0;
  const PoissonK1Model m(p);
  SimulationOptions opt;
  opt.stop.max_events = 200'000;
  Rng rng = make_path_rng(5, 0);
  EventSink* sinks[] = {&sink};
  simulate(m, {validate_state({0, 0}), Price{1}}, opt, rng, sinks);
  CHECK(sink.moves > 10'000);
  CHECK(sink.bad == 0);
}

TEST_CASE("queue-reactive books never leave the bids-left, asks-right space") {
  const QueueReactiveModel m(QueueReactiveParams::defaults(2));
  CHECK_FALSE(m.admits(validate_state({0, 0, -1, 3})));
  CHECK(m.admits(validate_state({-2, 0, 0, 3})));
  // Exhaustive over a box: no pure jump from an admitted book reaches a book outside.
  const StateScan scan(2, 6, {}, &m);
  std::uint64_t checked = 0;
  for (std::size_t c = 0; c < scan.chunk_count(); ++c)
    scan.for_each_in_chunk(c, [&](const OrderBookState& q) {
      for (const auto& t : enumerate_transitions(m, q, false)) {
        OrderBookState next = q;
        next.at_index(t.event.index) += t.event.kind == EventKind::Increase ? t.event.size : -t.event.size;
        CHECK(m.admits(next));
        ++checked;
      }
    });
  CHECK(checked > 1000);
}

TEST_CASE("price-move decorators") {
  auto base = std::make_shared<PoissonKModel>(PoissonKParams::defaults(2));
  const auto q = validate_state({-1, -2, 0, 4});  // best bid -1, best ask 2, i_mid = 0.5
  const BookView v(q);
  CHECK(freeze_price(base)->up_rate(v) == 0.0);
  CHECK(freeze_price(base)->down_rate(v) == 0.0);
  const auto c = with_constant_price_rates(base, 0.7, 0.2);
  CHECK(c->up_rate(v) == 0.7);
  CHECK(c->down_rate(v) == 0.2);
  const auto mc = with_mid_chasing(base, 0.1, 2.0);
  CHECK(mc->up_rate(v) == doctest::Approx(0.1));
  CHECK(mc->down_rate(v) == doctest::Approx(0.1));
  const auto far = validate_state({-1, 0, 0, 4});  // best bid -2, best ask 2, i_mid = 0
  CHECK(mc->up_rate(BookView(far)) == doctest::Approx(0.1));
  const auto skew = validate_state({0, 0, -1, 4});  // best bid 1, best ask 2, i_mid = 1.5
  CHECK(mc->up_rate(BookView(skew)) == doctest::Approx(0.1 + 2.0 * 1.0));
  CHECK(mc->down_rate(BookView(skew)) == doctest::Approx(0.1));
  CHECK_THROWS_AS(with_constant_price_rates(base, -1.0, 0.0), std::invalid_argument);
  CHECK(mc->name() == "poisson_k+mid_chasing");
}

TEST_CASE("signed geometric law") {
  const SignedGeometric g(0.3, -1);
  double total = 0.0, mean = 0.0;
  for (int l = 0; l <= 200; ++l) {
    total += g.pmf(-l);
    mean += l * g.pmf(-l);
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(mean == doctest::Approx(0.7 / 0.3));
  CHECK(g.pmf(3) == 0.0);
  CHECK(g.moment_radius() == doctest::Approx(1.0 / 0.7));
  // E z^|l| = p / (1 - (1 - p) z).
  CHECK(g.exact_moment(1.2) == doctest::Approx(0.3 / (1.0 - 0.7 * 1.2)));
  double clamped = 0.0;
  for (int l = 0; l <= 4; ++l) clamped += g.clamped_pmf(-l, 4);
  CHECK(clamped == doctest::Approx(1.0));

  Rng rng = make_path_rng(9, 0);
  double s = 0.0;
  const int n = 200'000;
  for (int k = 0; k < n; ++k) {
    const auto l = g.sample(rng);
    REQUIRE(l <= 0);
    s += static_cast<double>(-l);
  }
  const double sd = std::sqrt(0.7) / 0.3 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(s / n - 0.7 / 0.3) < 4.0 * sd);
}

TEST_CASE("product geometric book") {
  const ProductGeometricBook b(2, 0.5);
  CHECK(b.pmf(validate_state({-1, 0, 2, 0})) == doctest::Approx(std::pow(0.5, 4) * std::pow(0.5, 3)));
  CHECK(b.pmf(validate_state({0, 0, -1, 0})) == 0.0);
  Rng rng = make_path_rng(10, 0);
  OrderBookState q(2);
  for (int k = 0; k < 1000; ++k) {
    b.sample(rng, q);
    CHECK(q[-2] <= 0);
    CHECK(q[-1] <= 0);
    CHECK(q[1] >= 0);
    CHECK(q[2] >= 0);
  }
}
