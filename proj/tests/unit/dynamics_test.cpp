#include <cmath>
#include <limits>

#include "doctest.h"
#include "repgame/construction.hpp"
#include "repgame/error.hpp"
#include "repgame/io.hpp"
#include "repgame/simulate.hpp"
#include "support.hpp"

using namespace repgame;

namespace {

EquilibriumMachine example(double eps = 0.1) { return motivating_example_profile(eps); }

// all strategic types pool on the commitment action
Profile pooling_profile(const ReputationScenario& s, const MixedAction& alpha) {
  const int n1 = s.game.num_actions1();
  const int n2 = s.game.num_actions2();
  Profile p;
  p.player1.assign(s.num_states(), {Branch{1.0, Machine::stationary(alpha, n1, n2), ""}});
  p.player2.myopic = false;
  MixedAction g = MixedAction::pure(0, n2);
  p.player2.machine = Machine::stationary(g, n2, n1);
  p.player2.machine.states[0].next.assign(static_cast<std::size_t>(n1) * n2, 0);
  return p;
}

}  // namespace

TEST_CASE("bayes update on the example equilibrium, period 0") {
  const EquilibriumMachine eq = example();
  const ReputationScenario& s = eq.scenario;
  BeliefState b(s, eq.profile);
  const int a_star = 0;  // the mixed commitment action is the only non-L one
  const std::vector<double> lam0 = b.lambda(a_star);
  CHECK(lam0[1] == doctest::Approx(3.0));

  BeliefState after_h = bayes_update(b, 0, 1);  // observe H against M1
  const std::vector<double> lam1 = after_h.lambda(a_star);
  CHECK(lam1[1] == doctest::Approx(3.0 / 0.9));  // ratio scaled by 1/(1-eps)
  CHECK(lam1[0] == doctest::Approx(0.0));
  CHECK(lam1[2] == doctest::Approx(0.0));

  double total = 0.0;
  for (double x : after_h.masses()) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uninformative and eliminating updates") {
  ReputationScenario s = example().scenario;
  const MixedAction alpha = s.a1_star[0];

  // every characteristic plays alpha: the posterior never moves
  ReputationScenario pooled = s;
  pooled.commitments.plans[0].by_state = {alpha, alpha, alpha};
  pooled.finalize();
  Profile pool = pooling_profile(pooled, alpha);
  BeliefState b(pooled, pool);
  const std::vector<double> before = b.marginal();
  b.step(0, 0);
  b.step(1, 0);
  const std::vector<double> after = b.marginal();
  for (std::size_t i = 0; i < before.size(); ++i)
    CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));

  // an action only the commitment type plays sends the posterior there
  Profile all_h = pooling_profile(s, MixedAction::pure(0, 3));
  BeliefState c(s, all_h);
  c.step(1, 0);  // I is played only by the mixed commitment type
  const std::vector<double> marg = c.marginal();
  CHECK(marg[3] == doctest::Approx(1.0));  // cell (theta_star, plan)
  CHECK(c.commitment_mass(0) == doctest::Approx(1.0));
}

TEST_CASE("off-path observations are refused, not invented") {
  ReputationScenario s = example().scenario;
  const MixedAction alpha = s.a1_star[0];
  s.commitments.plans[0].by_state = {alpha, alpha, alpha};
  s.finalize();
  // strategic types play H, committed types mix over H and I: L is unplayed
  Profile all_h = pooling_profile(s, MixedAction::pure(0, 3));
  BeliefState b(s, all_h);
  CHECK_THROWS_AS(b.step(2, 0), OffPathError);
}

TEST_CASE("predicted action mixes the type rows") {
  const EquilibriumMachine eq = example();
  BeliefState b(eq.scenario, eq.profile);
  const MixedAction pred = b.predicted_action();
  // weights: theta_star 0.55 on L, theta_1 0.15 on H, theta_2 0.15 on I,
  // commitment 0.05 on (0.9, 0.1, 0), L-type 0.10 on L
  CHECK(pred.p[0] == doctest::Approx(0.15 + 0.05 * 0.9));
  CHECK(pred.p[1] == doctest::Approx(0.15 + 0.05 * 0.1));
  CHECK(pred.p[2] == doctest::Approx(0.55 + 0.10));

  // point-mass belief: that type's action
  Profile pool = pooling_profile(eq.scenario, eq.scenario.a1_star[0]);
  BeliefState c(eq.scenario, pool);
  c.step(1, 0);
  CHECK(c.predicted_action().approx_equal(eq.scenario.a1_star[0], 1e-12));
}

TEST_CASE("likelihood ratios match a from-scratch product of likelihoods") {
  const EquilibriumMachine eq = example();
  const ReputationScenario& s = eq.scenario;
  Rng rng(99);
  BeliefState b(s, eq.profile);
  // scratch recomputation: per-cell likelihood products against the profile
  std::vector<double> scratch(b.masses().size());
  for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] = b.masses()[i];
  std::vector<int> mstates = b.machine_states();

  for (int t = 0; t < 6; ++t) {
    const MixedAction pred = b.predicted_action();
    int a1 = rng.categorical(pred.p);
    b.step(a1, 0);
    for (std::size_t i = 0; i < scratch.size(); ++i) {
      const auto& cell = b.cells()[i];
      const MixedAction& play =
          cell.plan >= 0 ? s.commitments.plans[cell.plan].by_state[cell.state]
                         : cell.machine->states[mstates[i]].play;
      scratch[i] *= play.p[a1];
      if (cell.machine != nullptr)
        mstates[i] = cell.machine->next_state(mstates[i], a1, 0, 3);
    }
    double total = 0.0;
    for (double x : scratch) total += x;
    for (std::size_t i = 0; i < scratch.size(); ++i)
      CHECK(b.masses()[i] == doctest::Approx(scratch[i] / total).epsilon(1e-12));
  }
}

TEST_CASE("example payoff is one half at every discount factor") {
  const EquilibriumMachine eq = example();
  for (double delta : {0.9, 0.95, 0.99}) {
    SimConfig cfg;
    cfg.delta = delta;
    cfg.horizon = static_cast<int>(std::ceil(std::log(1e-12) / std::log(delta)));
    cfg.replications = 8;
    cfg.seed = 42;
    cfg.true_type = parse_true_type(eq.scenario, "strategic:theta_star");
    auto [traces, summary] = simulate(eq.scenario, eq.profile, cfg);
    for (const auto& tr : traces) {
      CHECK(std::abs(tr.discounted_payoff - 0.5) < 1e-9);
      double fsum = 0.0;
      for (double f : tr.discounted_freq) fsum += f;
      CHECK(fsum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("pooling profile keeps beliefs frozen and has no upcrossings") {
  const ReputationScenario s = example().scenario;
  Profile pool = pooling_profile(s, s.a1_star[0]);
  SimConfig cfg;
  cfg.delta = 0.95;
  cfg.horizon = 200;
  cfg.replications = 32;
  cfg.seed = 5;
  cfg.true_type = parse_true_type(s, "commitment:#0");
  cfg.reference_action = 0;
  cfg.region = region_spec_for(s, 0, s.a1_star[0]);
  cfg.has_band = true;
  auto [lv, cond] = prior_likelihood(s, s.a1_star[0]);
  const double chi0 = chi_statistic(lv.lambda, *cfg.region);
  cfg.band_lo = chi0;
  cfg.band_hi = chi0 + 0.1;
  auto [traces, summary] = simulate(s, pool, cfg);
  CHECK(summary.p_no_upcrossing == 1.0);
  CHECK(summary.pinsker_violations == 0);
  for (const auto& tr : traces) CHECK(tr.upcrossings == 0);
}

TEST_CASE("doob floor on the example with a unit prior ratio") {
  // mu(theta_1) = mu(theta_2) = mu(alpha1*) puts chi0 at 2/3
  EquilibriumMachine eq = example();
  ReputationScenario s = eq.scenario;
  const double c = s.prior.at(0, 1);  // commitment mass at theta_star
  const double shift = s.prior.at(1, 0) - c;
  s.prior.at(1, 0) = c;
  s.prior.at(2, 0) = c;
  s.prior.at(0, 0) += 2.0 * shift;
  s.finalize();

  SimConfig cfg;
  cfg.delta = 0.95;
  cfg.horizon = 50;
  cfg.replications = 10000;
  cfg.seed = 7;
  cfg.threads = 4;
  cfg.true_type = parse_true_type(s, "commitment:#0");
  cfg.reference_action = 0;
  RegionSpec spec;
  spec.psi = {std::numeric_limits<double>::infinity(), 3.0, 3.0};
  spec.chi = 1.0;
  cfg.region = spec;
  auto [lv, cond] = prior_likelihood(s, s.a1_star[0]);
  const double chi0 = chi_statistic(lv.lambda, *cfg.region);
  CHECK(chi0 == doctest::Approx(2.0 / 3.0));
  cfg.has_band = true;
  cfg.band_lo = chi0;
  cfg.band_hi = chi0 + 0.1;
  auto [traces, summary] = simulate(s, eq.profile, cfg);
  const double p = summary.p_no_upcrossing;
  const double sigma = std::sqrt(p * (1.0 - p) / cfg.replications);
  CHECK(p >= 0.1 / (chi0 + 0.1) - 3.0 * sigma);
}

TEST_CASE("simulation is deterministic in (seed, replication) across thread counts") {
  const EquilibriumMachine eq = example();
  SimConfig cfg;
  cfg.delta = 0.9;
  cfg.horizon = 60;
  cfg.replications = 64;
  cfg.seed = 1234;
  cfg.true_type = parse_true_type(eq.scenario, "prior");
  cfg.reference_action = 0;
  cfg.threads = 1;
  auto [t1, s1] = simulate(eq.scenario, eq.profile, cfg);
  cfg.threads = 4;
  auto [t4, s4] = simulate(eq.scenario, eq.profile, cfg);
  for (int r = 0; r < cfg.replications; ++r) {
    CHECK(t1[r].discounted_payoff == t4[r].discounted_payoff);
    CHECK(t1[r].sampled_state == t4[r].sampled_state);
    CHECK(t1[r].kl_sum == t4[r].kl_sum);
  }
}

TEST_CASE("average posterior at t=3 reproduces the prior under the prior measure") {
  const EquilibriumMachine eq = example();
  const ReputationScenario& s = eq.scenario;
  const int reps = 10000;
  std::vector<double> avg(s.prior.w.size(), 0.0);
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng = Rng::derive(31, rep);
    // sample the truth from the prior, then walk three periods
    std::vector<double> w(s.prior.w.begin(), s.prior.w.end());
    const int cell = rng.categorical(w);
    const int state = cell % s.num_states();
    const int ch = cell / s.num_states();
    BeliefState b(s, eq.profile);
    int mstate = -1;
    if (ch == 0) mstate = eq.profile.player1[state][0].machine.initial;
    for (int t = 0; t < 3; ++t) {
      MixedAction play = ch == 0 ? eq.profile.player1[state][0].machine.states[mstate].play
                                 : s.commitments.plans[ch - 1].by_state[state];
      const int a1 = rng.categorical(play.p);
      b.step(a1, 1);
      if (ch == 0)
        mstate = eq.profile.player1[state][0].machine.next_state(mstate, a1, 1, 3);
    }
    const std::vector<double> marg = b.marginal();
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += marg[i] / reps;
  }
  for (std::size_t i = 0; i < avg.size(); ++i) {
    const double p = s.prior.w[i];
    const double sigma = std::sqrt(p * (1.0 - p) / reps);
    CHECK(std::abs(avg[i] - p) <= 3.0 * sigma);
  }
}

TEST_CASE("supermartingale equality when types pool on the commitment action") {
  const ReputationScenario s = example().scenario;
  const MixedAction alpha = s.a1_star[0];
  Profile pool = pooling_profile(s, alpha);
  const auto rep = supermartingale_check(s, pool, alpha, 5);
  CHECK(rep.max_violation <= 1e-12);
  CHECK(rep.nodes > 1);
}

TEST_CASE("supermartingale check on the example equilibrium") {
  const EquilibriumMachine eq = example();
  const auto rep = supermartingale_check(eq.scenario, eq.profile, eq.scenario.a1_star[0], 6);
  CHECK(rep.max_violation <= 1e-9);
  CHECK_THROWS_AS(
      supermartingale_check(eq.scenario, eq.profile, eq.scenario.a1_star[0], 9), BudgetError);
}

TEST_CASE("supermartingale exactness on random scenarios") {
  Rng rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    const ReputationScenario s = testing::random_scenario(rng);
    const Profile p = testing::random_stationary_profile(s, rng);
    const auto rep = supermartingale_check(s, p, s.a1_star[0], 5);
    CHECK(rep.max_violation <= 1e-9);
  }
}

TEST_CASE("discounted frequency of a deterministic stream") {
  const MixedAction point = MixedAction::pure(1, 3);
  const auto rep = discounted_frequency_concentration(point, 0.9, 50, 3, {0.1}, 200, 1);
  CHECK(rep.mean_freq[1] == doctest::Approx(1.0).epsilon(1e-9));
  for (int a : {0, 2}) CHECK(rep.tail_prob[a][0] == 0.0);
  CHECK(rep.tail_prob[1][0] == 0.0);

  // far from the patient limit the report is informational only
  const auto loose = discounted_frequency_concentration(MixedAction({0.5, 0.5, 0.0}), 0.5,
                                                        200, 4, {0.1}, 60, 1);
  CHECK(loose.reps == 200);
  CHECK(loose.remainder == doctest::Approx(std::pow(0.5, 60)));
}

TEST_CASE("kl divergence and pinsker") {
  const MixedAction p({0.5, 0.5, 0.0});
  const MixedAction q({0.25, 0.7, 0.05});
  const double kl = kl_divergence(p, q);
  CHECK(kl >= 0.0);
  CHECK(p.l1_distance(q) <= std::sqrt(2.0 * kl) + 1e-12);
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(std::isinf(kl_divergence(p, MixedAction({1.0, 0.0, 0.0}))));
}

TEST_CASE("profile json round trip") {
  const EquilibriumMachine eq = example();
  const std::string text = profile_to_json(eq.profile, eq.scenario);
  const Profile back = parse_profile(text, eq.scenario);
  // behavioral equality: same simulated traces
  SimConfig cfg;
  cfg.delta = 0.9;
  cfg.horizon = 40;
  cfg.replications = 16;
  cfg.seed = 77;
  cfg.true_type = parse_true_type(eq.scenario, "prior");
  auto [ta, sa] = simulate(eq.scenario, eq.profile, cfg);
  auto [tb, sb] = simulate(eq.scenario, back, cfg);
  for (int r = 0; r < cfg.replications; ++r)
    CHECK(ta[r].discounted_payoff == tb[r].discounted_payoff);
  CHECK(sa.mean_payoff == sb.mean_payoff);
}
