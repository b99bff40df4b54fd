#include <doctest.h>

#include <cmath>

#include "lob/models.hpp"
#include "lob/scaling.hpp"

using namespace lob;

namespace {

ScalingConfig small_config(std::uint64_t calendar_paths) {
  ScalingConfig c;
  c.initial = {OrderBookState(1), Price{1}};
  c.seed = 11;
  c.series_paths = 2;
  c.series_events = 50'000;
  c.calendar_paths = calendar_paths;
  c.scales = {10.0, 100.0};
  c.times = {1.0};
  c.burn_in = 5000;
  c.check_burn_in = false;
  return c;
}

}  // namespace

TEST_CASE("default burn-in and block length") {
  CHECK(default_burn_in(1000) == 100'000);
  CHECK(default_burn_in(100'000'000) == 1'000'000);
  CHECK(batch_block(0) == 1000);
  CHECK(batch_block(99) == 2000);
}

TEST_CASE("symmetric model report") {
  const PoissonK1Model m(PoissonK1Params{});
  const auto r = scaling_report(m, small_config(200));
  CHECK_FALSE(r.nonzero_drift);
  REQUIRE(r.ratios.size() == 2);
  for (const auto& v : r.ratios) {
    CHECK(v.paths == 200);
    CHECK(v.horizon == doctest::Approx(v.n * v.t * r.e_tau.mean));
  }
  CHECK(r.rescaled_terminal.size() == 200);
  CHECK(r.series_events == 100'000);
  CHECK(r.sigma2_calendar == doctest::Approx(r.sigma2_event.sigma2 / r.e_tau.mean));
  CHECK(r.warnings.empty());
}

TEST_CASE("one-sided price moves are flagged") {
  auto m = with_constant_price_rates(std::make_shared<PoissonK1Model>(PoissonK1Params{}), 1.0, 0.0);
  const auto r = scaling_report(*m, small_config(50));
  CHECK(r.nonzero_drift);
  CHECK(r.mean_c.mean > 0.0);
}

TEST_CASE("a single calendar path still yields a report") {
  const PoissonK1Model m(PoissonK1Params{});
  const auto r = scaling_report(m, small_config(1));
  CHECK(r.rescaled_terminal.size() == 1);
  CHECK_FALSE(r.warnings.empty());
}
