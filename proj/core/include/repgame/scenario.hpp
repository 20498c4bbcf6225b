#pragma once

#include <string>
#include <vector>

#include "repgame/game.hpp"

namespace repgame {

// One feasible commitment plan: a mixed action per state, played forever.
struct Plan {
  std::string name;
  std::vector<MixedAction> by_state;
};

struct CommitmentStructure {
  std::vector<Plan> plans;
};

// Joint prior over (state, characteristic) where characteristic is either
// "strategic" or one of the plans.
struct Prior {
  int num_states = 0;
  int num_plans = 0;
  // flat [(num_plans + 1) * num_states]; characteristic 0 = strategic, 1+p = plan p
  std::vector<double> w;

  double at(int state, int characteristic) const {
    return w[static_cast<std::size_t>(characteristic) * num_states + state];
  }
  double& at(int state, int characteristic) {
    return w[static_cast<std::size_t>(characteristic) * num_states + state];
  }
  double total() const;
};

struct ReputationScenario {
  StageGame game;
  CommitmentStructure commitments;
  Prior prior;
  double delta = 0.95;

  // caches built by finalize()
  std::vector<MixedAction> a1_star;         // deduplicated commitment actions
  std::vector<std::vector<int>> plan_cell;  // [plan][state] -> index into a1_star

  // builds caches; throws ValidationError on structural problems
  void finalize();

  int num_states() const { return game.num_states(); }
  int num_commitment_actions() const { return static_cast<int>(a1_star.size()); }

  // prior mass of strategic type theta
  double strategic_mass(int state) const;
  // prior mass of commitment type a1star (plans playing it in their realized state)
  double commitment_mass(int a_star) const;
  // state distribution conditional on commitment type a1star
  std::vector<double> phi(int a_star) const;

  // index into a1_star, -1 when absent (tolerance on probabilities)
  int find_commitment_action(const MixedAction& a, double tol = kProbTol) const;
  // resolves "H" (pure action label), "#k" (index), or "plan@state"
  int resolve_commitment_action(const std::string& spec) const;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

// Checks the standing assumptions: full support of the prior, at least two
// actions per player, probability normalization, and flags every
// (state, commitment action) pair whose best reply is not a singleton.
ValidationReport validate_scenario(const ReputationScenario& s);

// Unique best reply a2*(theta, alpha1 | u2); throws AssumptionError on a tie,
// naming the tied actions.
int unique_best_reply(const ReputationScenario& s, int state, const MixedAction& alpha1);

// u1(theta, alpha1star, a2*(theta, alpha1star | u2))
double commitment_payoff(const ReputationScenario& s, int state, const MixedAction& a1star);

}  // namespace repgame
