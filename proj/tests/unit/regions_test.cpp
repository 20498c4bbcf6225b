#include <cmath>
#include <limits>

#include "doctest.h"
#include "repgame/construction.hpp"
#include "repgame/error.hpp"
#include "support.hpp"

using namespace repgame;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

MixedAction pure_h() { return MixedAction::pure(0, 3); }
}  // namespace

TEST_CASE("prior likelihood vectors and commitment conditionals") {
  const ReputationScenario s = motivating_example_scenario_pure();
  auto [lv, cond] = prior_likelihood(s, pure_h());
  CHECK(lv.lambda[1] == doctest::Approx(3.0));
  CHECK(lv.lambda[2] == doctest::Approx(3.0));
  CHECK(cond.phi[0] == doctest::Approx(1.0));
  CHECK(cond.phi[1] == doctest::Approx(0.0));

  // equal strategic and commitment masses give a unit ratio
  ReputationScenario eq = s;
  eq.prior.at(1, 0) = eq.prior.at(0, 1);
  eq.prior.at(0, 0) += 0.15 - eq.prior.at(1, 0);
  eq.finalize();
  auto [lv2, cond2] = prior_likelihood(eq, pure_h());
  CHECK(lv2.lambda[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(prior_likelihood(s, MixedAction({0.5, 0.5, 0.0})), ValidationError);
}

TEST_CASE("membership in the one-shot region") {
  const ReputationScenario s = motivating_example_scenario_pure();
  CHECK(in_lambda_bar(s, std::vector<double>{0.0, 2.0, 2.0}, 0, pure_h()));
  // exact tie between G and M1 at 4.5: strictly outside
  CHECK(!in_lambda_bar(s, std::vector<double>{0.0, 3.0, 0.0}, 0, pure_h()));
  CHECK(in_lambda_bar(s, std::vector<double>{0.0, 0.0, 0.0}, 0, pure_h()));
}

TEST_CASE("membership in the box region via vertex enumeration") {
  const ReputationScenario s = motivating_example_scenario_pure();
  for (double free_coord : {0.0, 5.0, 100.0})
    CHECK(in_lambda(s, std::vector<double>{free_coord, 2.0, 2.0}, 0, pure_h()));
  CHECK(!in_lambda(s, std::vector<double>{0.0, 4.0, 4.0}, 0, pure_h()));
  CHECK(in_lambda(s, std::vector<double>{0.0, 0.0, 0.0}, 0, pure_h()));
  // membership in the box region implies membership in the one-shot region
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> lam = {4.0 * rng.uniform(), 4.0 * rng.uniform(), 4.0 * rng.uniform()};
    if (in_lambda(s, lam, 0, pure_h())) CHECK(in_lambda_bar(s, lam, 0, pure_h()));
  }
}

TEST_CASE("states with a different best reply") {
  const ReputationScenario s = motivating_example_scenario_pure();
  CHECK(theta_b_set(s, 0, pure_h()) == std::vector<int>{1, 2});
  CHECK(theta_b_set(s, 1, pure_h()) == std::vector<int>{0, 2});

  // private values: u2 copied from one state everywhere
  ReputationScenario pv = s;
  for (int st = 1; st < 3; ++st)
    for (int a1 = 0; a1 < 3; ++a1)
      for (int a2 = 0; a2 < 3; ++a2)
        pv.game.u2[pv.game.idx(st, a1, a2)] = pv.game.u2[pv.game.idx(0, a1, a2)];
  pv.finalize();
  CHECK(theta_b_set(pv, 0, pure_h()).empty());
}

TEST_CASE("psi-star intercepts, closed form vs scan oracle") {
  const ReputationScenario s = motivating_example_scenario_pure();
  const PsiStar p1 = psi_star(s, 1, 0, pure_h());
  CHECK(p1.value == doctest::Approx(3.0));
  CHECK(!p1.rejected_at_zero);
  CHECK(psi_star(s, 2, 0, pure_h()).value == doctest::Approx(3.0));
  CHECK(std::isinf(psi_star(s, 0, 0, pure_h()).value));

  // 1e-3 step scan of the weighted argmax over psi in [0, 10]
  const int a2_star = unique_best_reply(s, 0, pure_h());
  const std::vector<double> phi = s.phi(s.find_commitment_action(pure_h()));
  double largest = 0.0;
  for (double psi = 0.0; psi <= 10.0; psi += 1e-3) {
    std::vector<double> lam(3, 0.0);
    lam[1] = psi;
    const auto arg = testing::oracle_weighted_argmax(s, phi, pure_h(), lam);
    if (std::find(arg.begin(), arg.end(), a2_star) != arg.end()) largest = psi;
  }
  CHECK(std::abs(largest - p1.value) <= 1e-3 + 1e-12);
}

TEST_CASE("linear sufficient region and the chi statistic") {
  RegionSpec spec;
  spec.psi = {kInf, 3.0, 3.0};
  spec.chi = 1.0;
  CHECK(in_lambda_underline(std::vector<double>{9.0, 1.0, 1.0}, spec));
  CHECK(!in_lambda_underline(std::vector<double>{9.0, 3.0, 3.0}, spec));
  CHECK(in_lambda_underline(std::vector<double>{0.0, 0.0, 0.0}, spec));

  CHECK(chi_statistic(std::vector<double>{5.0, 1.0, 1.0}, spec) == doctest::Approx(2.0 / 3.0));
  CHECK(chi_statistic(std::vector<double>{0.0, 0.0, 0.0}, spec) == 0.0);
  CHECK(chi_statistic(std::vector<double>{1.0, 3.0, 0.0}, spec) == doctest::Approx(1.0));

  // linearity over nonnegative combinations
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x = {rng.uniform(), rng.uniform(), rng.uniform()};
    std::vector<double> y = {rng.uniform(), rng.uniform(), rng.uniform()};
    const double a = 2.0 * rng.uniform(), b = 2.0 * rng.uniform();
    std::vector<double> combo(3);
    for (int i = 0; i < 3; ++i) combo[i] = a * x[i] + b * y[i];
    CHECK(chi_statistic(combo, spec) ==
          doctest::Approx(a * chi_statistic(x, spec) + b * chi_statistic(y, spec)));
  }
}

TEST_CASE("region spec from the scenario matches the intercepts") {
  const ReputationScenario s = motivating_example_scenario_pure();
  const RegionSpec spec = region_spec_for(s, 0, pure_h());
  CHECK(std::isinf(spec.psi[0]));
  CHECK(spec.psi[1] == doctest::Approx(3.0));
  CHECK(spec.psi[2] == doctest::Approx(3.0));
  CHECK(spec.chi == 1.0);

  // inside the linear region every theta_b coordinate stays below psi*
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> lam = {10.0 * rng.uniform(), 8.0 * rng.uniform(),
                               8.0 * rng.uniform()};
    if (!in_lambda_underline(lam, spec)) continue;
    CHECK(lam[1] < spec.psi[1]);
    CHECK(lam[2] < spec.psi[2]);
  }
}

TEST_CASE("the linear region and its complement are both convex") {
  RegionSpec spec;
  spec.psi = {kInf, 3.0, 3.0};
  spec.chi = 1.0;
  Rng rng(23);
  auto draw = [&](bool inside) {
    while (true) {
      std::vector<double> lam = {5.0 * rng.uniform(), 5.0 * rng.uniform(),
                                 5.0 * rng.uniform()};
      if (in_lambda_underline(lam, spec) == inside) return lam;
    }
  };
  for (int trial = 0; trial < 100; ++trial) {
    for (bool inside : {true, false}) {
      const auto x = draw(inside), y = draw(inside);
      const double w = rng.uniform();
      std::vector<double> combo(3);
      for (int i = 0; i < 3; ++i) combo[i] = w * x[i] + (1.0 - w) * y[i];
      CHECK(in_lambda_underline(combo, spec) == inside);
    }
  }
}

TEST_CASE("convex hull membership") {
  const MixedAction h = MixedAction::pure(0, 3);
  const MixedAction l = MixedAction::pure(2, 3);
  const MixedAction mid({0.5, 0.0, 0.5});
  const MixedAction near_h({0.9, 0.1, 0.0});
  CHECK(!in_convex_hull(h, std::vector<MixedAction>{l}));
  CHECK(in_convex_hull(mid, std::vector<MixedAction>{h, l}));
  CHECK(!in_convex_hull(h, std::vector<MixedAction>{near_h}));
  CHECK(!in_convex_hull(h, std::vector<MixedAction>{}));
  // interior combination of three points
  const MixedAction mix({0.25, 0.5, 0.25});
  CHECK(in_convex_hull(mix, std::vector<MixedAction>{h, l, MixedAction::pure(1, 3)}));
}

TEST_CASE("imperfect-monitoring payoff bound") {
  const ReputationScenario s = motivating_example_scenario_pure();
  CHECK(std::abs(imperfect_monitoring_bound(s, 0, pure_h(), 2.0 / 3.0)) <= 1e-15);
  CHECK(imperfect_monitoring_bound(s, 0, pure_h(), 0.0) ==
        doctest::Approx(commitment_payoff(s, 0, pure_h())));
  CHECK(imperfect_monitoring_bound(s, 0, pure_h(), 1.0) == doctest::Approx(-0.5));
}

TEST_CASE("boundary classification of the example prior") {
  const ReputationScenario s = motivating_example_scenario_pure();
  auto [lv, cond] = prior_likelihood(s, pure_h());
  // lambda = (11, 3, 3) sits exactly on the closure boundary: the vertex
  // (0, 3, 0) ties G against M1
  const auto membership = lambda_region_membership(s, lv.lambda, 0, pure_h());
  CHECK(membership.side == ClosureSide::boundary);
  CHECK(std::abs(membership.worst_margin) <= 1e-9);
}
