#include <cmath>

#include "doctest.h"
#include "repgame/construction.hpp"
#include "repgame/error.hpp"
#include "repgame/io.hpp"
#include "repgame/simulate.hpp"
#include "support.hpp"

using namespace repgame;

TEST_CASE("separating pair on the low-payoff fixture") {
  const ReputationScenario s = testing::low_payoff_scenario();
  auto [lv, cond] = prior_likelihood(s, MixedAction::pure(0, 3));
  CHECK(lv.lambda[1] == doctest::Approx(4.0));

  const auto pair = find_separating_pair(s, 0, 0);
  REQUIRE(pair.has_value());
  CHECK(pair->a2_prime == 1);  // M1, the first action beating G in order
  CHECK(pair->lambda_prime == std::vector<double>{0.0, 4.0, 0.0});
  CHECK(pair->margin_weighted == doctest::Approx(4.0));  // 4 * (3/2 - 1/2)
  CHECK(pair->margin_full == doctest::Approx(1.0));      // -3 + 4

  // inside the box region there is nothing to separate
  ReputationScenario inner = motivating_example_scenario_pure();
  inner.prior.at(1, 0) = 0.10;
  inner.prior.at(2, 0) = 0.10;
  inner.prior.at(0, 0) = 0.65;
  inner.finalize();
  std::string why;
  CHECK(!find_separating_pair(inner, 0, 0, &why).has_value());
  CHECK(why.find("inside") != std::string::npos);
}

TEST_CASE("cycle length and payoff-bound formulas") {
  CHECK(cycle_k_bar(0.5, 0.4) == 4);
  CHECK(deviation_payoff_bound(4, 20, 0.999) == doctest::Approx(0.8).epsilon(0.0125));
  CHECK(deviation_payoff_bound(4, 1, 0.9999999) == doctest::Approx(0.8));
  CHECK(deviation_payoff_bound(1, 1, 0.9999999) == doctest::Approx(0.5));
}

TEST_CASE("low-payoff construction parameters") {
  const ReputationScenario s = testing::low_payoff_scenario();
  const EquilibriumMachine eq = build_low_payoff_equilibrium(s, 0, 0);
  const ConstructionParams& c = eq.params;
  CHECK(c.a2_prime == 1);
  CHECK(c.eps == doctest::Approx(0.125));  // largest dyadic with -3 + (1-eps)4 > 0
  CHECK(c.eta == doctest::Approx(0.4));
  CHECK(c.kappa == doctest::Approx(0.5));
  CHECK(c.k_bar == 4);
  CHECK(c.k_star == 8);
  CHECK(c.t1 >= 1);
  CHECK(c.dev_action == 1);  // I, the first non-a1* action
  CHECK(c.mixed_actions.size() == 1);
  // alpha-hat shifts the mixed action's off-a1* mass to eta/2
  CHECK(c.alpha_hat[0].p[0] == doctest::Approx(0.8));
  CHECK(c.alpha_hat[0].p[1] == doctest::Approx(0.2));

  // the strict version of the separating inequality holds at the chosen eps
  double d = 0.0;
  for (int st = 0; st < 3; ++st) {
    std::vector<double> point(3, 0.0);
    point[st] = 1.0;
    d += c.lambda_prime[st] *
         (expected_payoff(s.game, s.game.u2, point, MixedAction::pure(0, 3), c.a2_prime) -
          expected_payoff(s.game, s.game.u2, point, MixedAction::pure(0, 3), 0));
  }
  const std::vector<double> phi = s.phi(s.find_commitment_action(MixedAction::pure(0, 3)));
  const double cc =
      expected_payoff(s.game, s.game.u2, phi, MixedAction::pure(0, 3), c.a2_prime) -
      expected_payoff(s.game, s.game.u2, phi, MixedAction::pure(0, 3), 0);
  CHECK(cc + (1.0 - c.eps) * d > 0.0);

  // u1 became the indicator of (theta_star, a1*, a2*)
  CHECK(eq.scenario.game.u1_at(0, 0, 0) == 1.0);
  double total = 0.0;
  for (double x : eq.scenario.game.u1) total += x;
  CHECK(total == 1.0);

  // mixture weights: theta_2 separates, theta_1 splits 7/8 pool, 1/8 shadow
  CHECK(eq.profile.player1[2].size() == 1);
  CHECK(eq.profile.player1[2][0].role == "separate");
  double pool_w = 0.0, shadow_w = 0.0;
  for (const auto& b : eq.profile.player1[1]) {
    if (b.role == "pool") pool_w = b.weight;
    if (b.role.rfind("shadow", 0) == 0) shadow_w = b.weight;
  }
  CHECK(pool_w == doctest::Approx(7.0 / 8.0));
  CHECK(shadow_w == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("weighted-reply inequality holds near the pure action") {
  const ReputationScenario s = testing::low_payoff_scenario();
  const EquilibriumMachine eq = build_low_payoff_equilibrium(s, 0, 0);
  const ConstructionParams& c = eq.params;
  // at every vertex of { alpha : alpha(a1*) >= 1 - eta }, the lambda'-weighted
  // payoff of a2' strictly beats a2*
  auto weighted_gap = [&](const MixedAction& alpha) {
    double gap = 0.0;
    for (int st = 0; st < 3; ++st) {
      if (c.lambda_prime[st] == 0.0) continue;
      std::vector<double> point(3, 0.0);
      point[st] = 1.0;
      gap += c.lambda_prime[st] *
             (expected_payoff(s.game, s.game.u2, point, alpha, c.a2_prime) -
              expected_payoff(s.game, s.game.u2, point, alpha, 0));
    }
    return gap;
  };
  CHECK(weighted_gap(MixedAction::pure(0, 3)) > 0.0);
  for (int a = 1; a < 3; ++a) {
    MixedAction vertex;
    vertex.p.assign(3, 0.0);
    vertex.p[0] = 1.0 - c.eta;
    vertex.p[a] = c.eta;
    CHECK(weighted_gap(vertex) > 0.0);
  }
  for (const auto& hat : c.alpha_hat) CHECK(weighted_gap(hat) > 0.0);
}

TEST_CASE("shadow ratio growth along post-deviation histories") {
  const ReputationScenario s = testing::low_payoff_scenario();
  const EquilibriumMachine eq = build_low_payoff_equilibrium(s, 0, 0);
  const ConstructionParams& c = eq.params;
  const int mixed_idx = c.mixed_actions[0];
  const std::string role = "shadow:#" + std::to_string(mixed_idx);
  const double grow = (1.0 - c.eta / 2.0) / (1.0 - c.eta);
  const double drop = c.eta / (2.0 * c.kappa);

  BeliefState b(eq.scenario, eq.profile);
  b.step(0, 0);  // H, consistent with theta_star's rotation
  b.step(0, 0);  // H again: theta_star's first deviation (the path says I)
  double beta = b.role_ratio(role, mixed_idx);
  CHECK(beta > 0.0);
  for (int t = 0; t < 6; ++t) {  // a1* observed repeatedly
    b.step(0, 0);
    const double next = b.role_ratio(role, mixed_idx);
    CHECK(next >= grow * beta - 1e-12);
    beta = next;
  }
  b.step(1, 0);  // a deviation action: the ratio can fall, but boundedly
  CHECK(b.role_ratio(role, mixed_idx) >= drop * beta - 1e-12);
}

TEST_CASE("on-path value of the low-payoff construction") {
  const ReputationScenario s = testing::low_payoff_scenario();
  const EquilibriumMachine eq = build_low_payoff_equilibrium(s, 0, 0);
  const double delta = 0.999;
  const int horizon = static_cast<int>(std::ceil(std::log(1e-10) / std::log(delta)));

  SimConfig cfg;
  cfg.delta = delta;
  cfg.horizon = horizon;
  cfg.replications = 1;
  cfg.seed = 1;
  cfg.true_type = parse_true_type(eq.scenario, "strategic:theta_star");
  auto [traces, summary] = simulate(eq.scenario, eq.profile, cfg);
  const double sim = traces[0].discounted_payoff;

  // closed form: period 0 pays 1 (player 2 opens with G against the prior),
  // the rest of the rotation pays 0, then the cycle pays k* ones per k*+1
  const double cycle = (1.0 - std::pow(delta, eq.params.k_star)) /
                       (1.0 - std::pow(delta, eq.params.k_star + 1));
  const double closed = (1.0 - delta) * 1.0 + std::pow(delta, 3) * cycle;
  CHECK(std::abs(sim - closed) <= 1e-9 + std::pow(delta, horizon));

  // and the delta -> 1 cycle value is 2 k-bar / (2 k-bar + 1) = 8/9
  CHECK(std::abs(sim - 8.0 / 9.0) <= 0.01);
}

TEST_CASE("incentive audit of the motivating example") {
  const EquilibriumMachine eq = motivating_example_profile(0.1);
  IncentiveConfig cfg;
  cfg.delta = 0.95;
  cfg.horizon = 200;
  cfg.tol = 1e-6;
  cfg.theta_star = 0;
  const IncentiveReport rep = check_incentives(eq.scenario, eq.profile, cfg);
  CHECK(rep.max_p2_gap <= 1e-9);
  CHECK(rep.max_oneshot_gain <= -0.01);  // deviations lose strictly
  CHECK(rep.pass(cfg.tol));
  CHECK(rep.states_checked >= 4);
}

TEST_CASE("incentive audit flags a planted dominated action") {
  EquilibriumMachine eq = motivating_example_profile(0.1);
  // player 2 plays G forever: strictly worse than M1 at the prior
  eq.profile.player2.machine = Machine::stationary(MixedAction::pure(0, 3), 3, 3);
  eq.profile.player2.machine.states[0].next.assign(9, 0);
  IncentiveConfig cfg;
  cfg.delta = 0.95;
  cfg.horizon = 100;
  cfg.theta_star = 0;
  const IncentiveReport rep = check_incentives(eq.scenario, eq.profile, cfg);
  CHECK(rep.max_p2_gap > 0.1);
  CHECK(rep.p2_first_violation.find("t=0") != std::string::npos);
}

TEST_CASE("punish-state beliefs make the mixed reply optimal") {
  const EquilibriumMachine eq = motivating_example_profile(0.1);
  const ReputationScenario& s = eq.scenario;
  // advance to period 1 and overwrite masses with the annotated posterior
  BeliefState b(s, eq.profile);
  b.step(0, 1);
  const MachineState& punish = eq.profile.player2.machine.states[3];
  REQUIRE(punish.has_belief);
  b.set_from_annotation(punish.belief);
  const std::vector<double> vals = b.reply_values_now();
  CHECK(vals[1] == doctest::Approx(vals[2]).epsilon(1e-12));  // M1 ties M2
  CHECK(vals[1] > vals[0]);                                   // both beat G
}

TEST_CASE("incentive audit runs on the myopic construction") {
  const ReputationScenario s = testing::low_payoff_scenario();
  const EquilibriumMachine eq = build_low_payoff_equilibrium(s, 0, 0);
  IncentiveConfig cfg;
  cfg.delta = 0.95;
  cfg.horizon = 25;
  cfg.theta_star = 0;
  cfg.state_budget = 100000;
  const IncentiveReport rep = check_incentives(eq.scenario, eq.profile, cfg);
  CHECK(rep.max_p2_gap == 0.0);  // player 2 is myopic by construction
  CHECK(rep.states_checked > 25);
}

TEST_CASE("equilibrium json round trip") {
  const ReputationScenario s = testing::low_payoff_scenario();
  const EquilibriumMachine eq = build_low_payoff_equilibrium(s, 0, 0);
  const std::string text = equilibrium_to_json(eq);
  write_file("/tmp/repgame_eq_test.json", text);
  const EquilibriumMachine back = load_equilibrium("/tmp/repgame_eq_test.json");
  CHECK(back.params.k_bar == eq.params.k_bar);
  CHECK(back.params.eta == doctest::Approx(eq.params.eta));
  CHECK(back.params.lambda_prime == eq.params.lambda_prime);
  CHECK(back.scenario.game.u1 == eq.scenario.game.u1);

  SimConfig cfg;
  cfg.delta = 0.99;
  cfg.horizon = 300;
  cfg.replications = 4;
  cfg.seed = 3;
  cfg.true_type = parse_true_type(eq.scenario, "strategic:theta_star");
  auto [ta, sa] = simulate(eq.scenario, eq.profile, cfg);
  auto [tb, sb] = simulate(back.scenario, back.profile, cfg);
  CHECK(sa.mean_payoff == doctest::Approx(sb.mean_payoff).epsilon(1e-12));
}

TEST_CASE("construction preconditions are enforced") {
  // inside the region: no separating pair, the build refuses
  ReputationScenario inner = motivating_example_scenario_pure();
  inner.prior.at(1, 0) = 0.10;
  inner.prior.at(2, 0) = 0.10;
  inner.prior.at(0, 0) = 0.65;
  inner.finalize();
  CHECK_THROWS_AS(build_low_payoff_equilibrium(inner, 0, 0), ValidationError);

  // a mixed action is not a valid reference for this construction
  const ReputationScenario s = testing::low_payoff_scenario();
  CHECK_THROWS_AS(build_low_payoff_equilibrium(s, 0, 1), ValidationError);
}

TEST_CASE("player 2's period-1 reply after H is M1") {
  const EquilibriumMachine eq = motivating_example_profile(0.1);
  const Machine& m2 = eq.profile.player2.machine;
  const int after_h = m2.next_state(m2.initial, 0, 1, 3);
  CHECK(m2.states[after_h].play.pure_index() == 1);
}
