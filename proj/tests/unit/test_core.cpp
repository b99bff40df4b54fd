#include <doctest.h>

#include "lob/core.hpp"

using namespace lob;

TEST_CASE("best bid index") {
  CHECK(best_bid_index(validate_state({0, 0})) == -2);
  CHECK(best_bid_index(validate_state({-3, 5})) == -1);
  CHECK(best_bid_index(validate_state({0, -2, 4, 7})) == -1);
}

TEST_CASE("best ask index") {
  CHECK(best_ask_index(validate_state({0, 0})) == 2);
  CHECK(best_ask_index(validate_state({-3, 5})) == 1);
  CHECK(best_ask_index(validate_state({-5, -1, 0, 6})) == 2);
}

TEST_CASE("validate_state") {
  SUBCASE("ask entry left of a bid entry is rejected") {
    try {
      validate_state({-1, 3, -2, 4});
      FAIL("accepted");
    } catch (const SignPatternViolation& e) {
      CHECK(e.index() == -1);
    }
  }
  SUBCASE("empty spread limits are allowed") { CHECK_NOTHROW(validate_state({-4, 0, 0, 2})); }
  SUBCASE("empty book") { CHECK_NOTHROW(validate_state({0, 0})); }
  SUBCASE("odd length") { CHECK_THROWS_AS(validate_state({0, 0, 0}), std::invalid_argument); }
  SUBCASE("bids right of p_ref are fine while no ask precedes them") {
    CHECK_NOTHROW(validate_state({0, 0, -1, 2}));
    CHECK_THROWS_AS(validate_state({0, 1, -1, 0}), SignPatternViolation);
  }
}

TEST_CASE("best bid is left of best ask on the whole box") {
  // K = 2, entries in [-2, 2]: every accepted vector satisfies the ordering.
  int accepted = 0;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) {
          const std::vector<QueueSize> raw{a, b, c, d};
          if (!in_state_space(raw)) continue;
          ++accepted;
          const auto q = validate_state(raw);
          CHECK(best_bid_index(q) < best_ask_index(q));
        }
  CHECK(accepted > 0);
}

TEST_CASE("price of index") {
  const Price p = reference_price_from_value(100.5, 1.0);
  CHECK(price_of_index(p, 1).value(1.0) == doctest::Approx(101.0));
  CHECK(price_of_index(p, -1).value(1.0) == doctest::Approx(100.0));
  // 100.5 is on the half-tick grid of alpha = 0.5 but not on its reference grid; the formula still applies.
  const Price q = price_from_value(100.5, 0.5);
  CHECK(price_of_index(q, -3).value(0.5) == doctest::Approx(99.25));
}

TEST_CASE("price of index is strictly increasing") {
  const Price p{7};
  for (int K = 1; K <= 4; ++K) {
    Price prev = price_of_index(p, -K);
    for (int i = -K + 1; i <= K; ++i) {
      if (i == 0) continue;
      const Price cur = price_of_index(p, i);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("reference grid") {
  CHECK(reference_price_from_value(0.5, 1.0).half_ticks == 1);
  CHECK_THROWS_AS(reference_price_from_value(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(price_from_value(0.3, 1.0), std::invalid_argument);
}

TEST_CASE("mid and spread") {
  SUBCASE("one-tick book") {
    const Price p = reference_price_from_value(10.5, 1.0);
    const auto m = mid_and_spread(validate_state({0, -2, 4, 7}), p);
    CHECK(m.mid_index() == 0.0);
    CHECK(m.mid == p);
    CHECK(m.spread_ticks() == 1.0);
    CHECK_FALSE(m.saturated);
  }
  SUBCASE("gaps in the spread") {
    const auto m = mid_and_spread(validate_state({-1, 0, 0, 3}), Price{1});
    CHECK(m.mid_index() == 0.0);
    CHECK(m.spread_ticks() == 3.0);
  }
  SUBCASE("empty book is saturated") {
    const auto m = mid_and_spread(validate_state({0, 0}), Price{1});
    CHECK(m.mid_index() == 0.0);
    CHECK(m.saturated);
  }
}

TEST_CASE("spread is invariant under translation") {
  const auto q = validate_state({-2, 0, 0, 0, 1, 4});
  const auto base = mid_and_spread(q, Price{1});
  for (std::int64_t shift : {-40, -2, 2, 1000}) {
    const auto m = mid_and_spread(q, Price{1 + shift});
    CHECK(m.spread == base.spread);
    CHECK(m.mid.half_ticks - base.mid.half_ticks == shift);
  }
}

TEST_CASE("slot layout") {
  for (int K = 1; K <= 3; ++K)
    for (int s = 0; s < 2 * K; ++s) CHECK(slot_of(index_of_slot(s, K), K) == s);
  CHECK(index_of_slot(0, 2) == -2);
  CHECK(index_of_slot(2, 2) == 1);
}

TEST_CASE("book params") {
  CHECK_THROWS_AS((BookParams{0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((BookParams{1, 0.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((BookParams{3, 0.01}.validate()));
}
