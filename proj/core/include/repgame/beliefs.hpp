#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "repgame/regions.hpp"
#include "repgame/strategy.hpp"

namespace repgame {

// One atom of the posterior: a (state, characteristic, branch) cell together
// with the machine that generates its play. Commitment cells have plan >= 0
// and branch -1; strategic cells have plan = -1.
struct BeliefCell {
  int state = 0;
  int plan = -1;
  int branch = -1;
  const Machine* machine = nullptr;
};

// Player 2's posterior at a public history, tracked at branch granularity so
// likelihood ratios and shadow-type ratios are exact.
class BeliefState {
 public:
  BeliefState(const ReputationScenario& s, const Profile& p);

  const ReputationScenario& scenario() const { return *scenario_; }
  const std::vector<BeliefCell>& cells() const { return cells_; }
  const std::vector<double>& masses() const { return mass_; }
  const std::vector<int>& machine_states() const { return mstate_; }

  // mass-weighted average of every cell's current mixed action
  MixedAction predicted_action() const;

  // Bayes step on the observed pair; throws OffPathError when total predicted
  // likelihood of a1 is below 1e-300.
  void step(int a1, int a2);
  // returns false (leaving masses unchanged, machines advanced) instead of throwing
  bool try_step(int a1, int a2);

  // advance machines but keep masses; the frozen-belief off-path rule
  void freeze_step(int a1, int a2);

  // strategic-theta mass / commitment-type mass, per state; a_star indexes A1*
  std::vector<double> lambda(int a_star) const;
  double commitment_mass(int a_star) const;
  bool lambda_defined(int a_star) const { return commitment_mass(a_star) > 1e-300; }
  double chi(int a_star, const RegionSpec& spec) const;

  // mass of strategic branches tagged `role` divided by commitment mass of a_star
  double role_ratio(const std::string& role, int a_star) const;

  // posterior marginal over (characteristic, state), flat as in Prior
  std::vector<double> marginal() const;
  // replace masses from a (characteristic, state) annotation, splitting mass
  // across branches in proportion to branch weights
  void set_from_annotation(std::span<const double> annotation);

  // player 2's myopic reply to the posterior: argmax of expected u2, lowest
  // index on ties
  int myopic_reply() const;
  std::vector<double> reply_values_now() const;

  // quantized fingerprint of (machine states, posterior) for history collapsing
  std::uint64_t key() const;

  double total_mass() const;
  void renormalize();

 private:
  const ReputationScenario* scenario_;
  const Profile* profile_;
  std::vector<BeliefCell> cells_;
  std::vector<double> mass_;
  std::vector<int> mstate_;
  std::vector<double> branch_weight_;  // initial branch weights per cell
};

// Functional wrappers matching the operation names used elsewhere.
BeliefState bayes_update(const BeliefState& b, int a1, int a2);
MixedAction predicted_action(const BeliefState& b);

}  // namespace repgame
