#include "repgame/construction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <unordered_map>

#include "repgame/error.hpp"

namespace repgame {

namespace {

StageGame example_stage_game() {
  StageGame g;
  g.states = {"theta_star", "theta_1", "theta_2"};
  g.actions1 = {"H", "I", "L"};
  g.actions2 = {"G", "M1", "M2"};
  g.u1 = {
      // theta_star
      1.0, -0.5, -0.5,  //
      2.0, 0.0, 0.0,    //
      3.0, 0.5, 0.5,    //
      // theta_1
      2.0, 1.0, -1.0,  //
      2.0, 1.0, -1.0,  //
      3.0, 1.5, 0.0,   //
      // theta_2
      2.0, -1.0, 1.0,  //
      2.0, -1.0, 1.0,  //
      3.0, 0.0, 1.5,   //
  };
  g.u2 = {
      // theta_star
      3.0, 0.0, 0.0,     //
      -1.0, -0.5, -0.5,  //
      -1.5, -1.0, -1.0,  //
      // theta_1
      0.5, 1.5, 0.0,   //
      0.0, 1.0, -0.5,  //
      -1.0, -1.0, -1.0,  //
      // theta_2
      0.5, 0.0, 1.5,   //
      0.0, -0.5, 1.0,  //
      -1.0, -1.0, -1.0,  //
  };
  return g;
}

ReputationScenario example_scenario(const MixedAction& commitment_at_theta_star) {
  ReputationScenario s;
  s.game = example_stage_game();
  Plan plan;
  plan.name = "gamma1";
  plan.by_state = {commitment_at_theta_star, MixedAction::pure(2, 3), MixedAction::pure(2, 3)};
  s.commitments.plans = {plan};
  s.prior.num_states = 3;
  s.prior.num_plans = 1;
  s.prior.w.assign(6, 0.0);
  s.prior.at(0, 0) = 0.55;  // strategic theta_star
  s.prior.at(1, 0) = 0.15;  // strategic theta_1, three times the commitment mass
  s.prior.at(2, 0) = 0.15;
  s.prior.at(0, 1) = 0.05;  // committed, plays the reference action in theta_star
  s.prior.at(1, 1) = 0.05;  // committed, plays L elsewhere
  s.prior.at(2, 1) = 0.05;
  s.delta = 0.95;
  s.finalize();
  return s;
}

}  // namespace

ReputationScenario motivating_example_scenario_pure() {
  return example_scenario(MixedAction::pure(0, 3));
}

EquilibriumMachine motivating_example_profile(double eps_mix) {
  if (!(eps_mix > 0.0 && eps_mix < 0.5))
    throw ValidationError("motivating_example_profile: eps_mix in (0, 1/2)");
  MixedAction alpha({1.0 - eps_mix, eps_mix, 0.0});
  EquilibriumMachine out;
  out.scenario = example_scenario(alpha);
  out.construction = "motivating-example";

  const int n1 = 3, n2 = 3;
  Profile& p = out.profile;
  p.name = "motivating-example";
  p.player1.resize(3);
  // theta_star plays L forever
  p.player1[0] = {Branch{1.0, Machine::stationary(MixedAction::pure(2, n1), n1, n2), ""}};
  // theta_1: H once, then the mixed commitment action
  p.player1[1] = {Branch{1.0, Machine::clock({MixedAction::pure(0, n1), alpha}, 1, n1, n2), ""}};
  // theta_2: I once, then the mixed commitment action
  p.player1[2] = {Branch{1.0, Machine::clock({MixedAction::pure(1, n1), alpha}, 1, n1, n2), ""}};

  // player 2: M1 (or M2) in period 0, then matched to what she observed;
  // L after H or I moves to the punish state with beliefs split over
  // strategic theta_1 and theta_2
  Machine m2;
  const bool favor_m1 = out.scenario.strategic_mass(1) >= out.scenario.strategic_mass(2);
  auto mk_state = [&](const MixedAction& play, int on_h, int on_i, int on_l) {
    MachineState st;
    st.play = play;
    st.next.assign(static_cast<std::size_t>(n1) * n2, 0);
    for (int a2 = 0; a2 < n2; ++a2) {
      st.next[0 * n2 + a2] = on_h;
      st.next[1 * n2 + a2] = on_i;
      st.next[2 * n2 + a2] = on_l;
    }
    return st;
  };
  m2.states.push_back(mk_state(MixedAction::pure(favor_m1 ? 1 : 2, n2), 1, 2, 3));
  m2.states.push_back(mk_state(MixedAction::pure(1, n2), 1, 1, 3));  // after H
  m2.states.push_back(mk_state(MixedAction::pure(2, n2), 2, 2, 3));  // after I
  MachineState punish = mk_state(MixedAction({0.0, 0.5, 0.5}), 3, 3, 3);
  punish.has_belief = true;
  punish.belief.assign(6, 0.0);
  punish.belief[1] = 0.5;  // strategic theta_1
  punish.belief[2] = 0.5;  // strategic theta_2
  m2.states.push_back(punish);
  p.player2.machine = std::move(m2);
  p.player2.myopic = false;

  p.check(out.scenario);
  return out;
}

std::optional<SeparatingPair> find_separating_pair(const ReputationScenario& s,
                                                   int theta_star, int a1_star_action,
                                                   std::string* why_none) {
  const MixedAction a1star = MixedAction::pure(a1_star_action, s.game.num_actions1());
  const int a_idx = s.find_commitment_action(a1star);
  if (a_idx < 0) {
    if (why_none) *why_none = "a1* is not a commitment action";
    return std::nullopt;
  }
  auto [lv, cond] = prior_likelihood(s, a1star);
  const auto membership = lambda_region_membership(s, lv.lambda, theta_star, a1star);
  if (membership.side != ClosureSide::outside) {
    if (why_none)
      *why_none = std::string("prior likelihood vector is ") +
                  (membership.side == ClosureSide::inside ? "inside the box region"
                                                          : "on the region boundary") +
                  " (worst vertex margin " + std::to_string(membership.worst_margin) + ")";
    return std::nullopt;
  }
  if (best_reply_set(s.game, s.phi(a_idx), a1star).size() != 1) {
    if (why_none) *why_none = "best reply to a1* under the commitment conditional is not unique";
    return std::nullopt;
  }
  const int a2_star = unique_best_reply(s, theta_star, a1star);

  const int m = s.num_states();
  const std::vector<double> phi = s.phi(a_idx);
  // per-state payoff differences u2(theta, a1*, a2) - u2(theta, a1*, a2*)
  auto diff = [&](int st, int a2) {
    return s.game.u2_at(st, a1_star_action, a2) - s.game.u2_at(st, a1_star_action, a2_star);
  };
  for (int a2 = 0; a2 < s.game.num_actions2(); ++a2) {
    if (a2 == a2_star) continue;
    double phi_diff = 0.0;
    for (int st = 0; st < m; ++st) phi_diff += phi[st] * diff(st, a2);
    // zeroed box vertices in lexicographic order
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      if ((mask >> theta_star) & 1) continue;
      double weighted = 0.0;
      std::vector<double> lp(m, 0.0);
      for (int st = 0; st < m; ++st) {
        if (!((mask >> st) & 1)) continue;
        lp[st] = lv.lambda[st];
        weighted += lp[st] * diff(st, a2);
      }
      if (weighted > kTieTol && phi_diff + weighted > kTieTol) {
        SeparatingPair pair;
        pair.lambda_prime = std::move(lp);
        pair.a2_prime = a2;
        pair.margin_weighted = weighted;
        pair.margin_full = phi_diff + weighted;
        return pair;
      }
    }
  }
  if (why_none) *why_none = "no zeroed box vertex separates any a2 from a2*";
  return std::nullopt;
}

int cycle_k_bar(double kappa, double eta) {
  if (kappa <= 0.0) return 1;
  const double num = std::log(2.0 * kappa / eta);
  const double den = std::log((1.0 - eta / 2.0) / (1.0 - eta));
  return std::max(1, static_cast<int>(std::ceil(num / den)));
}

int cycle_t1(double beta_bar, double beta_under, double eta) {
  if (beta_bar <= beta_under || beta_under <= 0.0) return 1;
  const double den = std::log((1.0 - eta / 2.0) / (1.0 - eta));
  return std::max(1, static_cast<int>(std::ceil(std::log(beta_bar / beta_under) / den)));
}

double deviation_payoff_bound(int k_bar, int t1, double delta) {
  const double dt1 = std::pow(delta, t1);
  const double cycle =
      (1.0 - std::pow(delta, k_bar)) / (1.0 - std::pow(delta, k_bar + 1));
  return (1.0 - dt1) + dt1 * cycle;
}

EquilibriumMachine build_low_payoff_equilibrium(const ReputationScenario& s, int theta_star,
                                                int a1_star_action) {
  const int n1 = s.game.num_actions1();
  const int n2 = s.game.num_actions2();
  const MixedAction a1star = MixedAction::pure(a1_star_action, n1);
  const int a_idx = s.find_commitment_action(a1star);
  if (a_idx < 0)
    throw ValidationError("build_low_payoff_equilibrium: a1* must be a pure commitment action");

  std::string why;
  auto pair = find_separating_pair(s, theta_star, a1_star_action, &why);
  if (!pair)
    throw ValidationError("build_low_payoff_equilibrium: separating pair not found: " + why);

  ConstructionParams params;
  params.lambda_prime = pair->lambda_prime;
  params.a2_prime = pair->a2_prime;
  params.a1_star = a1_star_action;
  params.rotation_len = n1;
  for (int a = 0; a < n1; ++a)
    if (a != a1_star_action) {
      params.dev_action = a;
      break;
    }

  // nontrivially mixed commitment actions and the eta/kappa gaps
  double max_weight = 0.0, min_mixed_weight = 1.0;
  for (int i = 0; i < s.num_commitment_actions(); ++i) {
    if (i == a_idx) continue;
    const double w = s.a1_star[i].p[a1_star_action];
    max_weight = std::max(max_weight, w);
    if (!s.a1_star[i].is_pure()) {
      if (w >= 1.0 - 1e-12)
        throw ValidationError("build_low_payoff_equilibrium: a mixed commitment action "
                              "puts probability one on a1*");
      params.mixed_actions.push_back(i);
      min_mixed_weight = std::min(min_mixed_weight, w);
    }
  }
  // largest eta on a 0.1 grid with max_weight < 1 - eta strictly
  params.eta = 0.0;
  for (int j = 9; j >= 1; --j) {
    const double eta = j / 10.0;
    if (max_weight < 1.0 - eta - 1e-12) {
      params.eta = eta;
      break;
    }
  }
  if (params.eta <= 0.0)
    throw ValidationError("build_low_payoff_equilibrium: no eta gap below 1");
  const int k = static_cast<int>(params.mixed_actions.size());
  params.kappa = k > 0 ? 1.0 - min_mixed_weight : 0.0;

  // largest dyadic eps keeping the separating inequality strict under (1 - eps)
  const double c = pair->margin_full - pair->margin_weighted;  // phi-part
  const double d = pair->margin_weighted;
  params.eps = 0.0;
  if (k > 0) {
    for (int j = 1; j <= 40; ++j) {
      const double eps = std::ldexp(1.0, -j);
      if (c + (1.0 - eps) * d > kTieTol) {
        params.eps = eps;
        break;
      }
    }
    if (params.eps == 0.0)
      throw ValidationError("build_low_payoff_equilibrium: no dyadic eps keeps the "
                            "separating inequality strict");
  }

  const int a2_star = unique_best_reply(s, theta_star, a1star);

  // alpha-hat per mixed action, and the beta thresholds
  for (int idx : params.mixed_actions) {
    const MixedAction& alpha = s.a1_star[idx];
    MixedAction tilde;
    tilde.p.assign(n1, 0.0);
    const double off = 1.0 - alpha.p[a1_star_action];
    for (int a = 0; a < n1; ++a)
      if (a != a1_star_action) tilde.p[a] = alpha.p[a] / off;
    MixedAction hat;
    hat.p.assign(n1, 0.0);
    for (int a = 0; a < n1; ++a) {
      hat.p[a] = (params.eta / 2.0) * tilde.p[a];
      if (a == a1_star_action) hat.p[a] += 1.0 - params.eta / 2.0;
    }
    params.alpha_hat.push_back(hat);

    const std::vector<double> phi_alpha = s.phi(idx);
    const double c_alpha = expected_payoff(s.game, s.game.u2, phi_alpha, alpha, params.a2_prime) -
                           expected_payoff(s.game, s.game.u2, phi_alpha, alpha, a2_star);
    double d_alpha = 0.0;
    for (int st = 0; st < s.num_states(); ++st) {
      if (params.lambda_prime[st] == 0.0) continue;
      std::vector<double> point(s.num_states(), 0.0);
      point[st] = 1.0;
      d_alpha += params.lambda_prime[st] *
                 (expected_payoff(s.game, s.game.u2, point, hat, params.a2_prime) -
                  expected_payoff(s.game, s.game.u2, point, hat, a2_star));
    }
    if (d_alpha <= 0.0)
      throw ValidationError("build_low_payoff_equilibrium: weighted reply gap is not "
                            "positive at alpha-hat");
    params.beta_bar_per.push_back(c_alpha >= 0.0 ? 0.0 : -c_alpha / d_alpha);
  }
  params.beta_bar = 0.0;
  for (double b : params.beta_bar_per) params.beta_bar = std::max(params.beta_bar, b);
  params.beta_bar *= 2.0;

  auto [lv, cond] = prior_likelihood(s, a1star);
  params.beta_under = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params.mixed_actions.size(); ++i) {
    const int idx = params.mixed_actions[i];
    double shadow_mass = 0.0;
    for (int st = 0; st < s.num_states(); ++st) {
      if (st == theta_star || lv.lambda[st] <= 0.0) continue;
      shadow_mass += s.strategic_mass(st) * (params.eps / k) *
                     (params.lambda_prime[st] / lv.lambda[st]);
    }
    params.beta_under = std::min(params.beta_under, shadow_mass / s.commitment_mass(idx));
  }
  if (k == 0) params.beta_under = 1.0;

  params.k_bar = cycle_k_bar(params.kappa, params.eta);
  params.k_star = 2 * params.k_bar;
  params.t1 = cycle_t1(params.beta_bar, params.beta_under, params.eta);

  // theta_star's calendar machine: every action once, then k* plays of a1*
  // and one play of the prespecified deviation action
  std::vector<MixedAction> seq;
  for (int a = 0; a < n1; ++a) seq.push_back(MixedAction::pure(a, n1));
  for (int j = 0; j < params.k_star; ++j) seq.push_back(MixedAction::pure(a1_star_action, n1));
  seq.push_back(MixedAction::pure(params.dev_action, n1));
  Machine theta_star_machine = Machine::clock(seq, n1, n1, n2);

  // pure-action indices theta_star plays, by period, for consistency tracking
  std::vector<int> prescribed;
  for (const auto& mix : seq) prescribed.push_back(mix.pure_index());

  EquilibriumMachine out;
  out.scenario = s;
  out.construction = "low-payoff";
  // player 1's payoff becomes the indicator of (theta_star, a1*, a2*)
  out.scenario.game.u1.assign(out.scenario.game.u1.size(), 0.0);
  out.scenario.game.u1[out.scenario.game.idx(theta_star, a1_star_action, a2_star)] = 1.0;

  Profile& p = out.profile;
  p.name = "low-payoff";
  p.player1.resize(s.num_states());
  p.player1[theta_star] = {Branch{1.0, theta_star_machine, "cycle"}};

  for (int st = 0; st < s.num_states(); ++st) {
    if (st == theta_star) continue;
    const double lam = lv.lambda[st];
    const double lam_p = params.lambda_prime[st];
    std::vector<Branch> branches;
    const double w_sep = (lam - lam_p) / lam;
    if (w_sep > 0.0)
      branches.push_back(
          Branch{w_sep, Machine::stationary(MixedAction::pure(params.dev_action, n1), n1, n2),
                 "separate"});
    const double w_pool = (1.0 - params.eps) * lam_p / lam;
    if (w_pool > 0.0)
      branches.push_back(
          Branch{w_pool, Machine::stationary(a1star, n1, n2), "pool"});
    for (std::size_t i = 0; i < params.mixed_actions.size(); ++i) {
      const double w_shadow = (params.eps / k) * lam_p / lam;
      if (w_shadow <= 0.0) continue;
      const int idx = params.mixed_actions[i];
      // follows theta_star's path playing alpha; switches to alpha-hat off it
      Machine shadow;
      const int off_state = static_cast<int>(prescribed.size());
      for (std::size_t t = 0; t < prescribed.size(); ++t) {
        MachineState ms;
        ms.play = s.a1_star[idx];
        ms.next.assign(static_cast<std::size_t>(n1) * n2, off_state);
        const int next_clock = t + 1 < prescribed.size() ? static_cast<int>(t) + 1 : n1;
        for (int a2 = 0; a2 < n2; ++a2) ms.next[prescribed[t] * n2 + a2] = next_clock;
        shadow.states.push_back(std::move(ms));
      }
      MachineState off;
      off.play = params.alpha_hat[i];
      off.next.assign(static_cast<std::size_t>(n1) * n2, off_state);
      shadow.states.push_back(std::move(off));
      branches.push_back(Branch{w_shadow, std::move(shadow), "shadow:#" + std::to_string(idx)});
    }
    p.player1[st] = std::move(branches);
  }
  p.player2.myopic = true;

  out.has_params = true;
  out.params = params;
  p.check(out.scenario);
  return out;
}

namespace {

// Exact discounted value table for theta_star against a machine player 2:
// V[t][s1][s2] with horizon truncation.
struct MachineValue {
  const ReputationScenario& s;
  int theta_star;
  const Machine& m1;
  const Machine& m2;
  double delta;
  int horizon;
  std::vector<double> table;  // [t][s1][s2]
  int n1_states, n2_states;

  MachineValue(const ReputationScenario& sc, int ts, const Machine& a, const Machine& b,
               double d, int h)
      : s(sc), theta_star(ts), m1(a), m2(b), delta(d), horizon(h) {
    n1_states = static_cast<int>(m1.states.size());
    n2_states = static_cast<int>(m2.states.size());
    table.assign(static_cast<std::size_t>(horizon + 1) * n1_states * n2_states, 0.0);
    for (int t = horizon - 1; t >= 0; --t)
      for (int s1 = 0; s1 < n1_states; ++s1)
        for (int s2 = 0; s2 < n2_states; ++s2)
          at(t, s1, s2) = step_value(t, s1, s2, m1.states[s1].play.pure_index());
  }
  double& at(int t, int s1, int s2) {
    return table[(static_cast<std::size_t>(t) * n1_states + s1) * n2_states + s2];
  }
  double get(int t, int s1, int s2) const {
    return table[(static_cast<std::size_t>(t) * n1_states + s1) * n2_states + s2];
  }
  // value of playing a1 now (machines then continue on their own)
  double step_value(int t, int s1, int s2, int a1) {
    const int n2 = s.game.num_actions2();
    const MixedAction& play2 = m2.states[s2].play;
    double v = 0.0;
    for (int a2 = 0; a2 < n2; ++a2) {
      if (play2.p[a2] == 0.0) continue;
      double cont = 0.0;
      if (t + 1 < horizon)
        cont = get(t + 1, m1.next_state(s1, a1, a2, n2), m2.next_state(s2, a1, a2, n2));
      v += play2.p[a2] *
           ((1.0 - delta) * s.game.u1_at(theta_star, a1, a2) + delta * cont);
    }
    return v;
  }
};

struct ReachNode {
  BeliefState belief;
  int p2_state;  // -1 myopic
  int t;
};

}  // namespace

IncentiveReport check_incentives(const ReputationScenario& s, const Profile& p,
                                 const IncentiveConfig& cfg) {
  p.check(s);
  IncentiveReport rep;
  const int theta_star = cfg.theta_star < 0 ? 0 : cfg.theta_star;
  const int n1 = s.game.num_actions1();
  const int n2 = s.game.num_actions2();
  rep.truncation_bound = 2.0 * std::pow(cfg.delta, cfg.horizon) * s.game.max_abs_u1();

  if (p.player1[theta_star].size() != 1)
    throw ValidationError("check_incentives: theta_star must have a single branch");
  const Machine& m1 = p.player1[theta_star][0].machine;
  for (const auto& st : m1.states)
    if (!st.play.is_pure())
      throw ValidationError("check_incentives: theta_star's machine must be deterministic");

  // index of theta_star's strategic cell in the belief state (machine-state tracking)
  BeliefState root(s, p);
  int theta_cell = -1;
  for (std::size_t i = 0; i < root.cells().size(); ++i) {
    const auto& c = root.cells()[i];
    if (c.plan < 0 && c.state == theta_star && c.branch == 0) theta_cell = static_cast<int>(i);
  }

  std::unique_ptr<MachineValue> mv;
  if (!p.player2.myopic)
    mv = std::make_unique<MachineValue>(s, theta_star, m1, p.player2.machine, cfg.delta,
                                        cfg.horizon);

  // myopic-2 rollout: theta_star's pure path, beliefs frozen on off-path steps
  auto rollout_value = [&](BeliefState belief, int s1, int t0,
                           int first_action) {
    double disc = 1.0, value = 0.0;
    int a1 = first_action;
    for (int t = t0; t < cfg.horizon; ++t) {
      const int a2 = belief.myopic_reply();
      value += (1.0 - cfg.delta) * disc * s.game.u1_at(theta_star, a1, a2);
      disc *= cfg.delta;
      belief.try_step(a1, a2);
      s1 = m1.next_state(s1, a1, a2, n2);
      a1 = m1.states[s1].play.pure_index();
    }
    return value;
  };

  // reachable collapsed public states, breadth-first so each state is audited
  // at its earliest reach time
  std::unordered_map<std::uint64_t, char> seen;
  std::deque<ReachNode> frontier;
  frontier.push_back({root, p.player2.myopic ? -1 : p.player2.machine.initial, 0});
  const bool a2_matters = [&] {
    if (p.player2.myopic) return false;
    if (!p.player1_a2_insensitive(s)) return true;
    return p.player2.machine.a2_sensitive(n1, n2);
  }();

  long checked = 0;
  while (!frontier.empty()) {
    ReachNode node = std::move(frontier.front());
    frontier.pop_front();
    std::uint64_t key = node.belief.key() * 1099511628211ull +
                        static_cast<std::uint64_t>(node.p2_state + 1);
    if (seen.count(key)) continue;
    seen.emplace(key, 1);
    if (++checked > cfg.state_budget)
      throw BudgetError("check_incentives: reachable-state budget exceeded at " +
                        std::to_string(checked) + " states");

    // (a) myopic best-reply audit for player 2
    MixedAction prescribed;
    if (p.player2.myopic) {
      prescribed = MixedAction::pure(node.belief.myopic_reply(), n2);
    } else {
      prescribed = p.player2.machine.states[node.p2_state].play;
    }
    {
      const std::vector<double> vals = node.belief.reply_values_now();
      const double best = *std::max_element(vals.begin(), vals.end());
      for (int a2 = 0; a2 < n2; ++a2) {
        if (prescribed.p[a2] <= 0.0) continue;
        const double gap = best - vals[a2];
        if (gap > rep.max_p2_gap) {
          rep.max_p2_gap = gap;
          rep.p2_where = "t=" + std::to_string(node.t) + " action " + s.game.actions2[a2];
        }
        if (gap > cfg.tol && rep.p2_first_violation.empty())
          rep.p2_first_violation =
              "t=" + std::to_string(node.t) + " action " + s.game.actions2[a2];
      }
    }

    // (b) one-shot deviations of theta_star with reversion
    if (node.t < cfg.horizon) {
      const int s1 = node.belief.machine_states()[theta_cell];
      const int a1_eq = m1.states[s1].play.pure_index();
      const double v_eq = p.player2.myopic
                              ? rollout_value(node.belief, s1, node.t, a1_eq)
                              : mv->get(node.t, s1, node.p2_state);
      for (int a1 = 0; a1 < n1; ++a1) {
        if (a1 == a1_eq) continue;
        const double v_dev = p.player2.myopic
                                 ? rollout_value(node.belief, s1, node.t, a1)
                                 : mv->step_value(node.t, s1, node.p2_state, a1);
        const double gain = v_dev - v_eq;
        if (gain > rep.max_oneshot_gain) {
          rep.max_oneshot_gain = gain;
          rep.oneshot_where = "t=" + std::to_string(node.t) + " state " +
                              s.game.states[theta_star] + " deviation " + s.game.actions1[a1];
        }
      }
    }

    // expand along positive-probability public actions
    if (node.t + 1 > cfg.horizon) continue;
    const MixedAction pred = node.belief.predicted_action();
    for (int a1 = 0; a1 < n1; ++a1) {
      if (pred.p[a1] <= 1e-15) continue;
      std::vector<int> a2s;
      if (p.player2.myopic) {
        a2s.push_back(node.belief.myopic_reply());
      } else if (a2_matters) {
        for (int a2 = 0; a2 < n2; ++a2)
          if (prescribed.p[a2] > 0.0) a2s.push_back(a2);
      } else {
        for (int a2 = 0; a2 < n2; ++a2)
          if (prescribed.p[a2] > 0.0) {
            a2s.push_back(a2);
            break;
          }
      }
      for (int a2 : a2s) {
        ReachNode child{node.belief, node.p2_state, node.t + 1};
        child.belief.step(a1, a2);
        if (!p.player2.myopic)
          child.p2_state = p.player2.machine.next_state(node.p2_state, a1, a2, n2);
        frontier.push_back(std::move(child));
      }
    }
  }
  rep.states_checked = checked;
  return rep;
}

}  // namespace repgame
