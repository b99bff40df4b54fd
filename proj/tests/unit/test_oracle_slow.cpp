#include <doctest.h>

#include <algorithm>

#include "lob/models.hpp"
#include "lob/oracle.hpp"
#include "lob/simulation.hpp"

using namespace lob;

// The truncated generator describes the process whose jumps out of the box
// land on the cap, which is what confine_to_box simulates.
TEST_CASE("zoo occupations match the truncated stationary law") {
  const std::vector<std::shared_ptr<const RateModel>> zoo = {
      std::make_shared<PoissonK1Model>(PoissonK1Params{}),
      std::make_shared<PoissonKModel>(PoissonKParams::defaults(1)),
      std::make_shared<PoissonKModel>(PoissonKParams::defaults(2)),
      std::make_shared<ZeroIntelligenceModel>(ZeroIntelligenceParams::defaults(1)),
      std::make_shared<ZeroIntelligenceModel>(ZeroIntelligenceParams::defaults(2)),
      std::make_shared<QueueReactiveModel>(QueueReactiveParams::defaults(1)),
      std::make_shared<QueueReactiveModel>(QueueReactiveParams::defaults(2)),
  };
  std::uint64_t seed = 300;
  for (const auto& base : zoo) {
    const auto frozen = freeze_price(base);
    for (QueueSize cap : {1, 3, 5}) {
      CAPTURE(base->name());
      CAPTURE(base->book().K);
      CAPTURE(cap);
      const auto gen = truncated_generator(*frozen, cap, PriceMode::Frozen);
      const auto pi = stationary_solve(gen).pi;
      const auto boxed = confine_to_box(frozen, cap);
      SimulationOptions opt;
      // Sampling error in TV grows like sqrt(states / events).
      opt.stop.max_events = std::max<std::uint64_t>(2'000'000, 10'000 * gen.size());
      opt.burn_in_events = 10'000;
      opt.record_occupation = true;
      Rng rng = make_path_rng(++seed, 0);
      const auto path = simulate(*boxed, {OrderBookState(base->book().K), Price{1}}, opt, rng);
      REQUIRE(path.ok());
      const auto occ = project_occupation(gen, path.occupation);
      CHECK(occ.outside_mass == 0.0);
      CHECK(total_variation(pi, occ.p) < 0.01);
    }
  }
}
