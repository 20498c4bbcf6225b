#pragma once

#include <cmath>
#include <vector>

#include "repgame/construction.hpp"
#include "repgame/rng.hpp"

namespace repgame::testing {

// Random small scenario: m states, payoffs on a half-integer grid, one plan
// whose realized actions include a mixed reference action.
inline ReputationScenario random_scenario(Rng& rng, int max_states = 3) {
  ReputationScenario s;
  const int m = 1 + static_cast<int>(rng.uniform() * max_states);
  const int n1 = 2 + static_cast<int>(rng.uniform() * 2);
  const int n2 = 2 + static_cast<int>(rng.uniform() * 2);
  for (int i = 0; i < m; ++i) s.game.states.push_back("s" + std::to_string(i));
  for (int i = 0; i < n1; ++i) s.game.actions1.push_back("a" + std::to_string(i));
  for (int i = 0; i < n2; ++i) s.game.actions2.push_back("b" + std::to_string(i));
  const std::size_t cells = static_cast<std::size_t>(m) * n1 * n2;
  for (std::size_t i = 0; i < cells; ++i) {
    s.game.u1.push_back(std::floor(rng.uniform() * 13.0 - 6.0) / 2.0);
    s.game.u2.push_back(std::floor(rng.uniform() * 13.0 - 6.0) / 2.0);
  }

  // one plan: a random mixed action with full support over the first
  // min(2, n1) actions in every state
  Plan plan;
  plan.name = "p0";
  MixedAction mix;
  mix.p.assign(n1, 0.0);
  const double w = 0.25 + 0.5 * rng.uniform();
  mix.p[0] = w;
  mix.p[1] = 1.0 - w;
  for (int st = 0; st < m; ++st) plan.by_state.push_back(mix);
  s.commitments.plans = {plan};

  s.prior.num_states = m;
  s.prior.num_plans = 1;
  s.prior.w.assign(static_cast<std::size_t>(2) * m, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < s.prior.w.size(); ++i) {
    s.prior.w[i] = 0.05 + rng.uniform();
    total += s.prior.w[i];
  }
  for (double& x : s.prior.w) x /= total;
  s.delta = 0.9;
  s.finalize();
  return s;
}

// Random profile of stationary strategic types plus a stationary player 2.
inline Profile random_stationary_profile(const ReputationScenario& s, Rng& rng) {
  const int n1 = s.game.num_actions1();
  const int n2 = s.game.num_actions2();
  Profile p;
  p.player1.resize(s.num_states());
  for (int st = 0; st < s.num_states(); ++st) {
    MixedAction mix;
    mix.p.assign(n1, 0.0);
    double total = 0.0;
    for (int a = 0; a < n1; ++a) {
      mix.p[a] = rng.uniform() < 0.3 ? 0.0 : 0.05 + rng.uniform();
      total += mix.p[a];
    }
    if (total == 0.0) {
      mix.p[0] = 1.0;
      total = 1.0;
    }
    for (double& x : mix.p) x /= total;
    p.player1[st] = {Branch{1.0, Machine::stationary(mix, n1, n2), ""}};
  }
  MixedAction mix2;
  mix2.p.assign(n2, 0.0);
  mix2.p[static_cast<int>(rng.uniform() * n2)] = 1.0;
  p.player2.myopic = false;
  p.player2.machine = Machine::stationary(mix2, n2, n1);
  // player 2 machines store transitions in (a1, a2) layout
  p.player2.machine.states[0].next.assign(static_cast<std::size_t>(n1) * n2, 0);
  return p;
}

// The example stage game with commitment action 0.5 H + 0.5 I at theta_star
// and L elsewhere. With psi* = (inf, 1.25, 1.25), strategic-type masses of
// `mu_strat` per off state and commitment mass `mu_commit`, the chi statistic
// starts at 2 * (mu_strat / mu_commit) / 1.25.
inline ReputationScenario band_scenario(double mu_commit, double mu_strat) {
  ReputationScenario s = motivating_example_scenario_pure();
  const MixedAction alpha({0.5, 0.5, 0.0});
  s.commitments.plans[0].by_state[0] = alpha;
  const double rest = 1.0 - mu_commit - 2.0 * mu_strat;
  const double mu_l = 0.1;  // commitment-L cells
  s.prior.at(0, 0) = rest - 2.0 * mu_l;  // strategic theta_star
  s.prior.at(1, 0) = mu_strat;
  s.prior.at(2, 0) = mu_strat;
  s.prior.at(0, 1) = mu_commit;
  s.prior.at(1, 1) = mu_l;
  s.prior.at(2, 1) = mu_l;
  s.finalize();
  return s;
}

// Stationary strategic types that overweight H relative to the commitment
// mix, so likelihood ratios move every period under the commitment measure.
inline Profile band_profile(const ReputationScenario& s) {
  const int n1 = 3, n2 = 3;
  Profile p;
  p.player1.resize(3);
  p.player1[0] = {Branch{1.0, Machine::stationary(MixedAction::pure(2, n1), n1, n2), ""}};
  p.player1[1] = {Branch{1.0, Machine::stationary(MixedAction({0.8, 0.2, 0.0}), n1, n2), ""}};
  p.player1[2] = {Branch{1.0, Machine::stationary(MixedAction({0.7, 0.3, 0.0}), n1, n2), ""}};
  p.player2.myopic = false;
  p.player2.machine = Machine::stationary(MixedAction::pure(0, n2), n2, n1);
  p.player2.machine.states[0].next.assign(static_cast<std::size_t>(n1) * n2, 0);
  (void)s;
  return p;
}

// The example game with a pure commitment action H at theta_star, one mixed
// commitment action 0.5 H + 0.5 I elsewhere, and prior ratios (9, 4, 4):
// outside the closure of the box region, so the low-payoff construction
// applies with a2' = M1 and lambda' = (0, 4, 0).
inline ReputationScenario low_payoff_scenario() {
  ReputationScenario s = motivating_example_scenario_pure();
  const MixedAction mixed({0.5, 0.5, 0.0});
  s.commitments.plans[0].by_state = {MixedAction::pure(0, 3), mixed, mixed};
  s.prior.at(0, 0) = 0.45;
  s.prior.at(1, 0) = 0.20;
  s.prior.at(2, 0) = 0.20;
  s.prior.at(0, 1) = 0.05;
  s.prior.at(1, 1) = 0.05;
  s.prior.at(2, 1) = 0.05;
  s.finalize();
  return s;
}

// Brute-force argmax of the weighted reply objective, in test code so the
// vertex reduction is checked against an independent evaluation.
inline std::vector<int> oracle_weighted_argmax(const ReputationScenario& s,
                                               const std::vector<double>& phi,
                                               const MixedAction& alpha,
                                               const std::vector<double>& lambda,
                                               double tol = 1e-9) {
  const int n2 = s.game.num_actions2();
  std::vector<double> vals(n2, 0.0);
  for (int a2 = 0; a2 < n2; ++a2) {
    for (int st = 0; st < s.num_states(); ++st)
      for (int a1 = 0; a1 < s.game.num_actions1(); ++a1)
        vals[a2] += (phi[st] + lambda[st]) * alpha.p[a1] * s.game.u2_at(st, a1, a2);
  }
  double best = vals[0];
  for (double v : vals) best = std::max(best, v);
  std::vector<int> out;
  for (int a2 = 0; a2 < n2; ++a2)
    if (vals[a2] >= best - tol) out.push_back(a2);
  return out;
}

}  // namespace repgame::testing
