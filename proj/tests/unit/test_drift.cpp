#include <doctest.h>

#include <cmath>
#include <limits>

#include "lob/assumptions.hpp"
#include "lob/drift.hpp"
#include "lob/models.hpp"
#include "toy_model.hpp"

using namespace lob;

namespace {

PoissonK1Params k1(double lambda, double mu) {
  PoissonK1Params p;
  p.lambda = lambda;
  p.mu = mu;
  p.theta = 1.0;
  return p;
}

}  // namespace

TEST_CASE("ctmc drift against a hand computation") {
  const PoissonK1Model m(k1(1.0, 2.0));
  const auto q = validate_state({-2, 3});
  const double z = 1.2, U = 2.0;
  auto V = [&](int x) { return std::pow(z, x - U); };
  // The ask grows at lambda and shrinks at mu; the bid likewise in absolute size.
  const double expected = 1.0 * (V(4) - V(3)) + 2.0 * (V(2) - V(3)) + 1.0 * (V(3) - V(2)) + 2.0 * (V(1) - V(2));
  CHECK(ctmc_drift(m, q, z, U) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(lyapunov(q, z, U) == doctest::Approx(V(2) + V(3)));
}

TEST_CASE("ctmc certificate for PoissonK1") {
  SUBCASE("lambda < mu holds") {
    const PoissonK1Model m(k1(1.0, 2.0));
    const auto cert = drift_check_ctmc(m, 1.2, 2.0, StateScan(1, 30));
    CHECK_FALSE(cert.violated);
    CHECK(cert.gamma_hat > 0.0);
    CHECK(cert.B_hat >= 0.0);
  }
  SUBCASE("lambda > mu fails with a witness far out") {
    const PoissonK1Model m(k1(2.0, 1.0));
    const auto cert = drift_check_ctmc(m, 1.2, 2.0, StateScan(1, 30));
    CHECK(cert.violated);
    const auto& w = cert.worst_state;
    CHECK(std::max(std::abs(w[-1]), std::abs(w[1])) >= 20);
    CHECK(cert.worst_drift > 0.0);
  }
}

TEST_CASE("the fitted drift bound holds on the scan") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  const StateScan scan(2, 6, sample_states(m, 1000, 3));
  const double z = 1.1, U = 5.0;
  const auto cert = drift_check_ctmc(m, z, U, scan);
  REQUIRE_FALSE(cert.violated);
  const double worst = scan_reduce(
      scan, 1, -std::numeric_limits<double>::infinity(),
      [&](double& acc, const OrderBookState& q) {
        const double slack = ctmc_drift(m, q, z, U) + cert.gamma_hat * lyapunov(q, z, U) - cert.B_hat;
        acc = std::max(acc, slack);
      },
      [](double& a, double b) { a = std::max(a, b); });
  CHECK(worst <= 1e-9 * std::max(1.0, cert.B_hat));
}

TEST_CASE("empty scans are rejected") {
  test::ToyModel m(1, [](Direction, int, const BookView&, QueueSize) { return 1.0; });
  m.admit = [](const OrderBookState&) { return false; };
  const StateScan scan(1, 3, {}, &m);
  CHECK(scan_size(scan) == 0);
  CHECK_THROWS_AS(drift_check_ctmc(m, 1.1, 2.0, scan), EmptyScan);
  CHECK_THROWS_AS(check_assumptions(m, scan, {1.1}, {2.0}), EmptyScan);
}

TEST_CASE("embedded certificate for the zoo defaults") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  const StateScan scan(2, 8, sample_states(m, 500, 5));
  EmbeddedOptions opt;
  opt.mc_draws = 20'000;
  const auto cert = drift_check_embedded(m, 1.1, 5.0, scan, opt);
  CHECK_FALSE(cert.violated);
  CHECK_FALSE(cert.price_share_violated);
  CHECK(cert.B_stderr >= 0.0);
}

TEST_CASE("boundary moments") {
  SUBCASE("geometric fills have closed-form moments") {
    const PoissonK1Model m(k1(1.0, 2.0));
    const auto bm = estimate_boundary_moments(m, 1.2, 2.0, 200'000, 9);
    // Product geometric(1/2) redraw on two slots: E z^|q| = p / (1 - (1 - p) z) per slot.
    const double per_slot = 0.5 / (1.0 - 0.5 * 1.2);
    const double expected = 2.0 * std::pow(1.2, -2.0) * per_slot;
    CHECK(std::abs(bm.e_inc - expected) <= 4.0 * bm.se_inc);
    CHECK(std::abs(bm.e_dec - expected) <= 4.0 * bm.se_dec);
  }
  SUBCASE("a heavy boundary fill is refused") {
    PoissonKParams p = PoissonKParams::defaults(2);
    p.redraw.boundary_p = 0.05;
    const PoissonKModel m(p);
    CHECK_THROWS_AS(estimate_boundary_moments(m, 1.1, 2.0, 100'000, 9), DivergentBoundaryMoment);
  }
}

TEST_CASE("assumptions for the Poisson model") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  const StateScan scan(2, 8, sample_states(m, 500, 5));
  const auto rep = check_assumptions(m, scan, {1.05, 1.1, 1.2}, {2.0, 5.0});
  REQUIRE(rep.entries.size() == 8);
  for (int n : {2, 3, 4, 5, 6, 7, 8, 9}) CHECK(rep.get(n).status == AssumptionStatus::VerifiedOnScan);
  CHECK_FALSE(rep.any_violated());
  CHECK(rep.get(9).margins.at("m") > 0.0);
}

TEST_CASE("the bracket beyond U matches a direct supremum") {
  const PoissonKModel m(PoissonKParams::defaults(2));
  const StateScan scan(2, 8);
  const auto rep = check_assumptions(m, scan, {1.1}, {5.0});
  const auto& e = rep.get(4);
  REQUIRE(e.status == AssumptionStatus::VerifiedOnScan);
  // Unit jumps: G(z) = z, so the bracket is f* - g*/z on a long ask and g* - f*/z on a long bid.
  const double z = rep.z_limit;
  const double direct = scan_reduce(
      scan, 1, -std::numeric_limits<double>::infinity(),
      [&](double& acc, const OrderBookState& q) {
        const BookView v(q);
        for (int i : {-2, -1, 1, 2}) {
          const double fs = star_rate(m, Direction::Insert, i, v), gs = star_rate(m, Direction::Deplete, i, v);
          if (i >= v.best_ask && q[i] > 5 && fs > 0.0) acc = std::max(acc, fs - gs / z);
          if (i <= v.best_bid && q[i] < -5 && gs > 0.0) acc = std::max(acc, gs - fs / z);
        }
      },
      [](double& a, double b) { a = std::max(a, b); });
  CHECK(e.margins.at("sup") == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("violated assumptions come with witnesses") {
  SUBCASE("a jump larger than the queue") {
    test::ToyModel m(
        1,
        [](Direction d, int i, const BookView&, QueueSize n) {
          return d == Direction::Deplete && i == 1 ? 1.0 / n : 1.0;
        },
        2);
    const auto rep = check_assumptions(m, StateScan(1, 3), {1.1}, {2.0});
    const auto& e = rep.get(2);
    CHECK(e.status == AssumptionStatus::Violated);
    REQUIRE(e.witness.has_value());
    CHECK((*e.witness)[1] < 2);
  }
  SUBCASE("price moves dominate everywhere") {
    auto m = with_constant_price_rates(std::make_shared<PoissonKModel>(PoissonKParams::defaults(2)), 1e9, 1e9);
    const auto rep = check_assumptions(*m, StateScan(2, 7), {1.1}, {5.0});
    CHECK(rep.get(8).status == AssumptionStatus::Violated);
    CHECK(rep.get(8).witness.has_value());
  }
  SUBCASE("an absorbing state") {
    test::ToyModel m(1, [](Direction d, int i, const BookView& v, QueueSize) {
      return d == Direction::Insert && i == 1 && v.q[1] < 2 ? 1.0 : 0.0;
    });
    const auto rep = check_assumptions(m, StateScan(1, 3), {1.1}, {2.0});
    CHECK(rep.get(9).status == AssumptionStatus::Violated);
    REQUIRE(rep.get(9).witness.has_value());
    CHECK(pure_jump_rate(m, BookView(*rep.get(9).witness)) == 0.0);
  }
}
