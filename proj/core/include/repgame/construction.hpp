#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "repgame/bounds.hpp"

namespace repgame {

// Numbers pinned down by the low-payoff construction.
struct ConstructionParams {
  std::vector<double> lambda_prime;  // per state, zero at theta_star
  int a2_prime = -1;
  double eps = 0.0;    // dyadic slack keeping the separating inequality strict
  double eta = 0.0;    // gap below 1 of every other commitment action's a1* weight
  double kappa = 0.0;  // 1 - min over mixed commitment actions of alpha1(a1*)
  int k_bar = 1;
  int k_star = 2;
  int t1 = 1;
  double beta_bar = 0.0;
  double beta_under = 0.0;
  std::vector<int> mixed_actions;        // A1* indices of nontrivially mixed actions
  std::vector<double> beta_bar_per;      // aligned with mixed_actions
  std::vector<MixedAction> alpha_hat;    // aligned with mixed_actions
  int rotation_len = 0;
  int dev_action = -1;  // the prespecified non-a1* action in the cycle
  int a1_star = -1;     // action index of the pure reference action
};

// A packaged strategy profile: the (possibly payoff-modified) scenario it is
// built for, the machines, and the construction's parameters.
struct EquilibriumMachine {
  ReputationScenario scenario;
  Profile profile;
  std::string construction;
  bool has_params = false;
  ConstructionParams params;
};

// The three-state example: a perturbed commitment action (1-eps_mix) H + eps_mix I,
// the prior with likelihood ratios (., 3, 3), and the low-payoff profile in
// which the theta_star strategic type earns 1/2 at every discount factor.
EquilibriumMachine motivating_example_profile(double eps_mix);

// The same stage game with the pure commitment action H.
ReputationScenario motivating_example_scenario_pure();

struct SeparatingPair {
  std::vector<double> lambda_prime;
  int a2_prime = -1;
  double margin_weighted = 0.0;  // the lambda'-only inequality
  double margin_full = 0.0;      // including the commitment-conditional terms
};

// Searches zeroed box vertices for a (lambda', a2') pair making a2' beat a2*
// both with and without the commitment-conditional term; ties broken by
// player-2 action order.
std::optional<SeparatingPair> find_separating_pair(const ReputationScenario& s,
                                                   int theta_star, int a1_star_action,
                                                   std::string* why_none = nullptr);

// ceil(ln(2 kappa / eta) / ln((1 - eta/2) / (1 - eta))), at least 1
int cycle_k_bar(double kappa, double eta);
// ceil(ln(beta_bar / beta_under) / ln((1 - eta/2) / (1 - eta))), at least 1
int cycle_t1(double beta_bar, double beta_under, double eta);

// (1 - delta^T1) + delta^T1 (1 - delta^kbar) / (1 - delta^(kbar+1));
// tends to kbar / (kbar + 1) as delta -> 1
double deviation_payoff_bound(int k_bar, int t1, double delta);

// Builds the low-payoff equilibrium for a pure commitment action: replaces u1
// by the indicator of (theta_star, a1*, a2*), assembles the rotation-and-cycle
// machine for theta_star, the mixture branches for the other strategic types,
// the shadow machines for mixed commitment actions, and a myopic player 2.
EquilibriumMachine build_low_payoff_equilibrium(const ReputationScenario& s, int theta_star,
                                                int a1_star_action);

struct IncentiveConfig {
  double delta = 0.95;
  int horizon = 200;
  double tol = 1e-6;
  int theta_star = -1;     // defaults to the scenario's first state
  long state_budget = 200000;
};

struct IncentiveReport {
  double max_p2_gap = 0.0;        // worst shortfall of a prescribed action vs the argmax
  std::string p2_where;
  std::string p2_first_violation;  // earliest reachable state with a gap above tol
  double max_oneshot_gain = -std::numeric_limits<double>::infinity();
  std::string oneshot_where;
  long states_checked = 0;
  double truncation_bound = 0.0;  // 2 delta^horizon max|u1|
  bool pass(double tol) const { return max_p2_gap <= tol && max_oneshot_gain <= tol; }
};

// (a) at every reachable collapsed public state, player 2's prescribed action
// is a myopic best reply to the posterior-weighted predicted action;
// (b) no one-period deviation of strategic theta_star followed by reversion
// gains more than tol.
IncentiveReport check_incentives(const ReputationScenario& s, const Profile& p,
                                 const IncentiveConfig& cfg);

}  // namespace repgame
