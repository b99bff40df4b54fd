#include <doctest.h>

#include <cmath>

#include "lob/models.hpp"
#include "lob/oracle.hpp"
#include "lob/scan.hpp"
#include "lob/shape.hpp"
#include "lob/simulation.hpp"
#include "toy_model.hpp"

using namespace lob;

namespace {

using SparseQ = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseQ dense_to_sparse(const std::vector<std::vector<double>>& rows) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      if (rows[r][c] != 0.0) t.emplace_back(static_cast<int>(r), static_cast<int>(c), rows[r][c]);
  SparseQ Q(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  Q.setFromTriplets(t.begin(), t.end());
  return Q;
}

std::shared_ptr<const RateModel> frozen_k1() {
  PoissonK1Params p;
  p.lambda = 1.0;
  p.mu = 2.0;
  return freeze_price(std::make_shared<PoissonK1Model>(p));
}

}  // namespace

TEST_CASE("truncated PoissonK1 has a geometric ask queue") {
  const auto m = frozen_k1();
  const auto gen = truncated_generator(*m, 3, PriceMode::Frozen);
  const auto st = stationary_solve(gen);
  CHECK(st.relative_residual < 1e-10);
  std::vector<double> marginal(4, 0.0);
  for (std::size_t k = 0; k < gen.size(); ++k)
    if (gen.states[k][1] >= 0) marginal[static_cast<std::size_t>(gen.states[k][1])] += st.pi[k];
  const double expected[] = {8.0 / 15, 4.0 / 15, 2.0 / 15, 1.0 / 15};
  for (int n = 0; n < 4; ++n) CHECK(marginal[static_cast<std::size_t>(n)] == doctest::Approx(expected[n]).epsilon(1e-10));

  // Mean ask size 11/15 through the shape statistics.
  const auto shape = shape_statistics(gen, st.pi);
  CHECK(shape.mean_abs[1] == doctest::Approx(11.0 / 15).epsilon(1e-10));
  CHECK(shape.mean_abs[0] == doctest::Approx(11.0 / 15).epsilon(1e-10));
}

TEST_CASE("generator rows sum to zero") {
  const std::vector<std::shared_ptr<const RateModel>> models = {
      std::make_shared<PoissonKModel>(PoissonKParams::defaults(2)),
      std::make_shared<ZeroIntelligenceModel>(ZeroIntelligenceParams::defaults(2)),
      std::make_shared<QueueReactiveModel>(QueueReactiveParams::defaults(2)),
  };
  for (const auto& m : models)
    for (PriceMode mode : {PriceMode::Frozen, PriceMode::Collapsed}) {
      const auto gen = truncated_generator(*m, 3, mode);
      double worst = 0.0;
      for (Eigen::Index r = 0; r < gen.Q.outerSize(); ++r) {
        double s = 0.0;
        for (SparseQ::InnerIterator it(gen.Q, r); it; ++it) {
          s += it.value();
          if (it.col() != r) CHECK(it.value() > 0.0);
        }
        worst = std::max(worst, std::abs(s));
      }
      CHECK(worst <= 1e-12);
    }
}

TEST_CASE("cap zero has a single state") {
  const auto gen = truncated_generator(*frozen_k1(), 0, PriceMode::Frozen);
  REQUIRE(gen.size() == 1);
  const auto st = stationary_solve(gen);
  CHECK(st.pi == std::vector<double>{1.0});
}

TEST_CASE("state bound") {
  try {
    truncated_generator(*frozen_k1(), 50, PriceMode::Frozen, 1000);
    FAIL("expected StateSpaceTooLarge");
  } catch (const StateSpaceTooLarge& e) {
    CHECK(e.count() == count_box_states(1, 50));
    CHECK(e.bound() == 1000);
  }
}

TEST_CASE("small generators") {
  SUBCASE("two isolated states") {
    const auto Q = dense_to_sparse({{0, 0}, {0, 0}});
    CHECK(closed_classes(Q).size() == 2);
    CHECK_THROWS_AS(stationary_solve(Q), Reducible);
  }
  SUBCASE("complete graph is uniform") {
    std::vector<std::vector<double>> rows(5, std::vector<double>(5, 1.0));
    for (int k = 0; k < 5; ++k) rows[k][k] = -4.0;
    const auto st = stationary_solve(dense_to_sparse(rows));
    for (double p : st.pi) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("a transient state gets no mass") {
    const auto st = stationary_solve(dense_to_sparse({{-1, 1, 0}, {0, -2, 2}, {0, 1, -1}}));
    CHECK(st.transient_states == 1);
    CHECK(st.pi[0] == 0.0);
    CHECK(st.pi[1] == doctest::Approx(1.0 / 3));
    CHECK(st.pi[2] == doctest::Approx(2.0 / 3));
  }
}

TEST_CASE("occupation projection") {
  const auto gen = truncated_generator(*frozen_k1(), 1, PriceMode::Frozen);
  Occupation occ;
  occ[validate_state({0, 0})] = 3.0;
  occ[validate_state({-1, 1})] = 1.0;
  occ[validate_state({-4, 0})] = 4.0;
  const auto cond = project_occupation(gen, occ);
  CHECK(cond.outside_mass == doctest::Approx(0.5));
  CHECK(cond.p[gen.index.at(validate_state({0, 0}))] == doctest::Approx(0.75));
  const auto clamp = project_occupation(gen, occ, OccupationProjection::Clamp);
  CHECK(clamp.p[gen.index.at(validate_state({-1, 0}))] == doctest::Approx(0.5));
  CHECK(total_variation(cond.p, cond.p) == 0.0);
  CHECK(total_variation(cond.p, clamp.p) == doctest::Approx(0.5));
}

TEST_CASE("box confinement folds overshooting jumps onto the cap") {
  test::ToyModel m(
      1, [](Direction d, int i, const BookView&, QueueSize n) { return d == Direction::Insert && i == 1 ? 1.0 * n : 0.0; },
      3);
  const auto boxed = confine_to_box(std::make_shared<test::ToyModel>(m), 2);
  const auto q = validate_state({0, 1});
  const BookView v(q);
  CHECK(effective_rate(*boxed, Direction::Insert, 1, v, 1) == 1.0 + 2.0 + 3.0);
  CHECK(effective_rate(*boxed, Direction::Insert, 1, v, 2) == 0.0);
  CHECK_FALSE(boxed->admits(validate_state({0, 3})));
}

TEST_CASE("shape statistics of a point mass") {
  const auto q = validate_state({-2, -1, 0, 3});
  const auto s = shape_statistics(std::vector<std::pair<OrderBookState, double>>{{q, 0.0}});
  CHECK(s.mean_abs == std::vector<double>{2, 1, 0, 3});
  CHECK(s.mean_signed == std::vector<double>{-2, -1, 0, 3});
  REQUIRE(s.spread.size() == 1);
  CHECK(s.spread.begin()->first == mid_and_spread(q, Price{1}).spread_ticks());
  CHECK(s.spread.begin()->second == 1.0);
  CHECK(s.saturated_mass == 0.0);
  CHECK_THROWS_AS(shape_statistics(std::vector<std::pair<OrderBookState, double>>{}), std::invalid_argument);
}

TEST_CASE("simulated and exact shapes agree") {
  const auto m = frozen_k1();
  const auto gen = truncated_generator(*m, 20, PriceMode::Frozen);
  const auto exact = shape_statistics(gen, stationary_solve(gen).pi);
  SimulationOptions opt;
  opt.stop.max_events = 2'000'000;
  opt.burn_in_events = 100'000;
  opt.record_occupation = true;
  Rng rng = make_path_rng(21, 0);
  const auto path = simulate(*m, {OrderBookState(1), Price{1}}, opt, rng);
  const auto sim = shape_statistics(path.occupation);
  for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(sim.mean_abs[s] - exact.mean_abs[s]) <= 0.02 * exact.mean_abs[s]);
}
