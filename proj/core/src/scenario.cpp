#include "repgame/scenario.hpp"

#include <cmath>
#include <sstream>

#include "repgame/error.hpp"

namespace repgame {

double Prior::total() const {
  double t = 0.0;
  for (double x : w) t += x;
  return t;
}

void ReputationScenario::finalize() {
  game.check();
  if (!(delta > 0.0 && delta < 1.0))
    throw ValidationError("scenario: delta must lie in (0,1)");
  const int m = game.num_states();
  if (prior.num_states != m || prior.num_plans != static_cast<int>(commitments.plans.size()))
    throw ValidationError("scenario: prior dimensions do not match states/plans");
  if (prior.w.size() != static_cast<std::size_t>((prior.num_plans + 1) * m))
    throw ValidationError("scenario: prior cell count mismatch");

  a1_star.clear();
  plan_cell.assign(commitments.plans.size(), std::vector<int>(m, -1));
  for (std::size_t p = 0; p < commitments.plans.size(); ++p) {
    const Plan& plan = commitments.plans[p];
    if (static_cast<int>(plan.by_state.size()) != m)
      throw ValidationError("plan '" + plan.name + "': needs one action per state");
    for (int s = 0; s < m; ++s) {
      plan.by_state[s].check("plan '" + plan.name + "' state " + game.states[s]);
      if (plan.by_state[s].size() != game.num_actions1())
        throw ValidationError("plan '" + plan.name + "': action vector size mismatch");
      int found = find_commitment_action(plan.by_state[s]);
      if (found < 0) {
        a1_star.push_back(plan.by_state[s]);
        found = static_cast<int>(a1_star.size()) - 1;
      }
      plan_cell[p][s] = found;
    }
  }
}

double ReputationScenario::strategic_mass(int state) const { return prior.at(state, 0); }

double ReputationScenario::commitment_mass(int a_star) const {
  double mass = 0.0;
  for (std::size_t p = 0; p < commitments.plans.size(); ++p)
    for (int s = 0; s < num_states(); ++s)
      if (plan_cell[p][s] == a_star) mass += prior.at(s, 1 + static_cast<int>(p));
  return mass;
}

std::vector<double> ReputationScenario::phi(int a_star) const {
  std::vector<double> out(num_states(), 0.0);
  for (std::size_t p = 0; p < commitments.plans.size(); ++p)
    for (int s = 0; s < num_states(); ++s)
      if (plan_cell[p][s] == a_star) out[s] += prior.at(s, 1 + static_cast<int>(p));
  double total = 0.0;
  for (double x : out) total += x;
  if (total <= 0.0)
    throw ValidationError("phi: commitment action has zero prior mass");
  for (double& x : out) x /= total;
  return out;
}

int ReputationScenario::find_commitment_action(const MixedAction& a, double tol) const {
  for (int i = 0; i < num_commitment_actions(); ++i)
    if (a1_star[i].approx_equal(a, tol)) return i;
  return -1;
}

int ReputationScenario::resolve_commitment_action(const std::string& spec) const {
  if (!spec.empty() && spec[0] == '#') {
    int k = std::stoi(spec.substr(1));
    if (k < 0 || k >= num_commitment_actions())
      throw ValidationError("commitment action index out of range: " + spec);
    return k;
  }
  auto at = spec.find('@');
  if (at != std::string::npos) {
    const std::string plan_name = spec.substr(0, at);
    const std::string state_name = spec.substr(at + 1);
    const int s = game.state_index(state_name);
    if (s < 0) throw ValidationError("unknown state: " + state_name);
    for (std::size_t p = 0; p < commitments.plans.size(); ++p)
      if (commitments.plans[p].name == plan_name) return plan_cell[p][s];
    throw ValidationError("unknown plan: " + plan_name);
  }
  const int a1 = game.action1_index(spec);
  if (a1 >= 0) {
    const int idx = find_commitment_action(MixedAction::pure(a1, game.num_actions1()));
    if (idx >= 0) return idx;
  }
  throw ValidationError("not a commitment action: " + spec);
}

namespace {
std::string action_set_string(const StageGame& g, const std::vector<int>& set) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < set.size(); ++i) os << (i ? "," : "") << g.actions2[set[i]];
  os << "}";
  return os.str();
}
}  // namespace

ValidationReport validate_scenario(const ReputationScenario& s) {
  ValidationReport report;
  const StageGame& g = s.game;

  if (g.num_actions1() < 2)
    report.errors.push_back("action set A1 is degenerate (needs at least 2 actions)");
  if (g.num_actions2() < 2)
    report.errors.push_back("action set A2 is degenerate (needs at least 2 actions)");

  double total = s.prior.total();
  if (std::abs(total - 1.0) > kProbTol)
    report.errors.push_back("prior does not normalize: total mass " + std::to_string(total));
  for (int c = 0; c <= s.prior.num_plans; ++c) {
    for (int st = 0; st < s.num_states(); ++st) {
      if (s.prior.at(st, c) <= 0.0) {
        const std::string who = c == 0 ? "strategic" : s.commitments.plans[c - 1].name;
        report.errors.push_back("full support violated: prior(" + g.states[st] + "," + who +
                                ") is not strictly positive");
      } else if (s.prior.at(st, c) < 0.0) {
        report.errors.push_back("negative prior cell");
      }
    }
  }

  // ties in BR2(theta, a1star | u2) violate the unique-reply assumption
  for (int a = 0; a < s.num_commitment_actions(); ++a) {
    for (int st = 0; st < s.num_states(); ++st) {
      auto set = best_reply_set_state(g, st, s.a1_star[a]);
      if (set.size() > 1) {
        std::ostringstream os;
        os << "best reply to commitment action #" << a << " in state " << g.states[st]
           << " is not unique: " << action_set_string(g, set);
        report.warnings.push_back(os.str());
      }
    }
  }
  return report;
}

int unique_best_reply(const ReputationScenario& s, int state, const MixedAction& alpha1) {
  auto set = best_reply_set_state(s.game, state, alpha1);
  if (set.size() != 1) {
    throw AssumptionError("best reply in state " + s.game.states[state] +
                          " is not unique: " + action_set_string(s.game, set));
  }
  return set[0];
}

double commitment_payoff(const ReputationScenario& s, int state, const MixedAction& a1star) {
  const int a2 = unique_best_reply(s, state, a1star);
  std::vector<double> phi(s.num_states(), 0.0);
  phi[state] = 1.0;
  return expected_payoff(s.game, s.game.u1, phi, a1star, a2);
}

}  // namespace repgame
