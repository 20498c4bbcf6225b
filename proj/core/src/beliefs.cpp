#include "repgame/beliefs.hpp"

#include <cmath>
#include <limits>

#include "repgame/error.hpp"

namespace repgame {

BeliefState::BeliefState(const ReputationScenario& s, const Profile& p)
    : scenario_(&s), profile_(&p) {
  for (int st = 0; st < s.num_states(); ++st) {
    const auto& branches = p.player1[st];
    for (std::size_t b = 0; b < branches.size(); ++b) {
      if (branches[b].weight <= 0.0) continue;
      cells_.push_back({st, -1, static_cast<int>(b), &branches[b].machine});
      mass_.push_back(s.strategic_mass(st) * branches[b].weight);
      mstate_.push_back(branches[b].machine.initial);
      branch_weight_.push_back(branches[b].weight);
    }
  }
  // commitment cells: stationary play of the plan's realized action
  for (std::size_t pl = 0; pl < s.commitments.plans.size(); ++pl) {
    for (int st = 0; st < s.num_states(); ++st) {
      cells_.push_back({st, static_cast<int>(pl), -1, nullptr});
      mass_.push_back(s.prior.at(st, 1 + static_cast<int>(pl)));
      mstate_.push_back(0);
      branch_weight_.push_back(1.0);
    }
  }
  renormalize();
}

namespace {
const MixedAction& cell_play(const ReputationScenario& s, const BeliefCell& c, int mstate) {
  if (c.plan >= 0) return s.commitments.plans[c.plan].by_state[c.state];
  return c.machine->states[mstate].play;
}
}  // namespace

MixedAction BeliefState::predicted_action() const {
  MixedAction out;
  out.p.assign(scenario_->game.num_actions1(), 0.0);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (mass_[i] == 0.0) continue;
    const MixedAction& play = cell_play(*scenario_, cells_[i], mstate_[i]);
    for (int a = 0; a < out.size(); ++a) out.p[a] += mass_[i] * play.p[a];
  }
  return out;
}

void BeliefState::step(int a1, int a2) {
  if (!try_step(a1, a2))
    throw OffPathError("bayes_update: observed action " + scenario_->game.actions1[a1] +
                       " has zero probability under every type");
}

bool BeliefState::try_step(int a1, int a2) {
  double total = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i)
    total += mass_[i] * cell_play(*scenario_, cells_[i], mstate_[i]).p[a1];
  if (total < 1e-300) {
    freeze_step(a1, a2);
    return false;
  }
  const int n2 = scenario_->game.num_actions2();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const double like = cell_play(*scenario_, cells_[i], mstate_[i]).p[a1];
    mass_[i] = mass_[i] * like / total;
    if (cells_[i].machine != nullptr)
      mstate_[i] = cells_[i].machine->next_state(mstate_[i], a1, a2, n2);
  }
  return true;
}

void BeliefState::freeze_step(int a1, int a2) {
  const int n2 = scenario_->game.num_actions2();
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i].machine != nullptr)
      mstate_[i] = cells_[i].machine->next_state(mstate_[i], a1, a2, n2);
}

std::vector<double> BeliefState::lambda(int a_star) const {
  const double denom = commitment_mass(a_star);
  std::vector<double> out(scenario_->num_states(), 0.0);
  if (denom < 1e-300) return out;  // callers gate on lambda_defined()
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (cells_[i].plan < 0) out[cells_[i].state] += mass_[i];
  for (double& x : out) x /= denom;
  return out;
}

double BeliefState::commitment_mass(int a_star) const {
  double denom = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& c = cells_[i];
    if (c.plan >= 0 && scenario_->plan_cell[c.plan][c.state] == a_star) denom += mass_[i];
  }
  return denom;
}

double BeliefState::chi(int a_star, const RegionSpec& spec) const {
  return chi_statistic(lambda(a_star), spec);
}

double BeliefState::role_ratio(const std::string& role, int a_star) const {
  const double denom = commitment_mass(a_star);
  if (denom < 1e-300) return std::numeric_limits<double>::infinity();
  double num = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& c = cells_[i];
    if (c.plan < 0 && profile_->player1[c.state][c.branch].role == role) num += mass_[i];
  }
  return num / denom;
}

std::vector<double> BeliefState::marginal() const {
  std::vector<double> out(static_cast<std::size_t>(scenario_->prior.num_plans + 1) *
                              scenario_->num_states(),
                          0.0);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& c = cells_[i];
    const int ch = c.plan < 0 ? 0 : 1 + c.plan;
    out[static_cast<std::size_t>(ch) * scenario_->num_states() + c.state] += mass_[i];
  }
  return out;
}

void BeliefState::set_from_annotation(std::span<const double> annotation) {
  // branch weights within a (state, characteristic) group keep their prior
  // proportions; the annotation fixes the group totals
  const int m = scenario_->num_states();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& c = cells_[i];
    const int ch = c.plan < 0 ? 0 : 1 + c.plan;
    mass_[i] = annotation[static_cast<std::size_t>(ch) * m + c.state] * branch_weight_[i];
  }
  renormalize();
}

std::vector<double> BeliefState::reply_values_now() const {
  const StageGame& g = scenario_->game;
  std::vector<double> vals(g.num_actions2(), 0.0);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (mass_[i] == 0.0) continue;
    const MixedAction& play = cell_play(*scenario_, cells_[i], mstate_[i]);
    for (int a2 = 0; a2 < g.num_actions2(); ++a2) {
      double inner = 0.0;
      for (int a1 = 0; a1 < g.num_actions1(); ++a1) {
        if (play.p[a1] == 0.0) continue;
        inner += play.p[a1] * g.u2_at(cells_[i].state, a1, a2);
      }
      vals[a2] += mass_[i] * inner;
    }
  }
  return vals;
}

int BeliefState::myopic_reply() const {
  const std::vector<double> vals = reply_values_now();
  int best = 0;
  for (int a2 = 1; a2 < static_cast<int>(vals.size()); ++a2)
    if (vals[a2] > vals[best]) best = a2;
  return best;
}

std::uint64_t BeliefState::key() const {
  // FNV-1a over machine states and masses quantized at 1e-10
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  for (int ms : mstate_) mix(static_cast<std::uint64_t>(ms));
  for (double x : mass_) mix(static_cast<std::uint64_t>(std::llround(x * 1e10)));
  return h;
}

double BeliefState::total_mass() const {
  double t = 0.0;
  for (double x : mass_) t += x;
  return t;
}

void BeliefState::renormalize() {
  const double t = total_mass();
  if (t <= 0.0) throw ValidationError("belief state has zero total mass");
  for (double& x : mass_) x /= t;
}

BeliefState bayes_update(const BeliefState& b, int a1, int a2) {
  BeliefState out = b;
  out.step(a1, a2);
  return out;
}

MixedAction predicted_action(const BeliefState& b) { return b.predicted_action(); }

}  // namespace repgame
