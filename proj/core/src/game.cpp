#include "repgame/game.hpp"

#include <algorithm>
#include <cmath>

#include "repgame/error.hpp"

namespace repgame {

MixedAction MixedAction::pure(int action, int num_actions) {
  std::vector<double> p(num_actions, 0.0);
  p[action] = 1.0;
  return MixedAction(std::move(p));
}

bool MixedAction::is_pure(double tol) const { return pure_index(tol) >= 0; }

int MixedAction::pure_index(double tol) const {
  for (int i = 0; i < size(); ++i) {
    if (p[i] >= 1.0 - tol) return i;
  }
  return -1;
}

std::vector<int> MixedAction::support(double tol) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (p[i] > tol) out.push_back(i);
  }
  return out;
}

double MixedAction::l1_distance(const MixedAction& other) const {
  double d = 0.0;
  for (int i = 0; i < size(); ++i) d += std::abs(p[i] - other.p[i]);
  return d;
}

bool MixedAction::approx_equal(const MixedAction& other, double tol) const {
  if (size() != other.size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (std::abs(p[i] - other.p[i]) > tol) return false;
  }
  return true;
}

void MixedAction::check(const std::string& what) const {
  if (p.empty()) throw ValidationError(what + ": empty action vector");
  double sum = 0.0;
  for (double x : p) {
    if (x < -1e-15) throw ValidationError(what + ": negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kProbTol)
    throw ValidationError(what + ": probabilities sum to " + std::to_string(sum));
  if (support().empty()) throw ValidationError(what + ": empty support");
}

namespace {
int label_index(const std::vector<std::string>& labels, const std::string& label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}
double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

int StageGame::state_index(const std::string& label) const { return label_index(states, label); }
int StageGame::action1_index(const std::string& label) const { return label_index(actions1, label); }
int StageGame::action2_index(const std::string& label) const { return label_index(actions2, label); }

double StageGame::max_abs_u1() const { return max_abs(u1); }
double StageGame::max_abs_u2() const { return max_abs(u2); }

void StageGame::check() const {
  if (states.empty()) throw ValidationError("game: no states");
  if (actions1.empty() || actions2.empty()) throw ValidationError("game: empty action set");
  const std::size_t want = states.size() * actions1.size() * actions2.size();
  if (u1.size() != want || u2.size() != want)
    throw ValidationError("game: payoff tensor dimensions do not match label lists");
  for (double x : u1)
    if (!std::isfinite(x)) throw ValidationError("game: non-finite u1 entry");
  for (double x : u2)
    if (!std::isfinite(x)) throw ValidationError("game: non-finite u2 entry");
}

double expected_payoff(const StageGame& g, std::span<const double> u,
                       std::span<const double> phi, const MixedAction& alpha1, int a2) {
  if (static_cast<int>(phi.size()) != g.num_states() || alpha1.size() != g.num_actions1())
    throw ValidationError("expected_payoff: dimension mismatch");
  double total = 0.0;
  for (int s = 0; s < g.num_states(); ++s) {
    if (phi[s] == 0.0) continue;
    double inner = 0.0;
    for (int a1 = 0; a1 < g.num_actions1(); ++a1) {
      if (alpha1.p[a1] == 0.0) continue;
      inner += alpha1.p[a1] * u[g.idx(s, a1, a2)];
    }
    total += phi[s] * inner;
  }
  return total;
}

std::vector<double> reply_values(const StageGame& g, std::span<const double> phi,
                                 const MixedAction& alpha1) {
  std::vector<double> vals(g.num_actions2());
  for (int a2 = 0; a2 < g.num_actions2(); ++a2)
    vals[a2] = expected_payoff(g, g.u2, phi, alpha1, a2);
  return vals;
}

std::vector<int> best_reply_set(const StageGame& g, std::span<const double> phi,
                                const MixedAction& alpha1, double tol) {
  const std::vector<double> vals = reply_values(g, phi, alpha1);
  const double best = *std::max_element(vals.begin(), vals.end());
  std::vector<int> out;
  for (int a2 = 0; a2 < g.num_actions2(); ++a2) {
    if (vals[a2] >= best - tol) out.push_back(a2);
  }
  return out;
}

std::vector<int> best_reply_set_state(const StageGame& g, int state,
                                      const MixedAction& alpha1, double tol) {
  std::vector<double> phi(g.num_states(), 0.0);
  phi[state] = 1.0;
  return best_reply_set(g, phi, alpha1, tol);
}

}  // namespace repgame
