#pragma once

#include <span>
#include <string>
#include <vector>

namespace repgame {

inline constexpr double kTieTol = 1e-9;   // argmax membership tolerance
inline constexpr double kProbTol = 1e-9;  // probability normalization tolerance

// Mixed action over an ordered action list, probabilities aligned by index.
struct MixedAction {
  std::vector<double> p;

  MixedAction() = default;
  explicit MixedAction(std::vector<double> probs) : p(std::move(probs)) {}

  static MixedAction pure(int action, int num_actions);

  int size() const { return static_cast<int>(p.size()); }
  bool is_pure(double tol = 1e-12) const;
  // index of the probability-one action; -1 if not pure
  int pure_index(double tol = 1e-12) const;
  std::vector<int> support(double tol = 1e-12) const;
  double l1_distance(const MixedAction& other) const;
  bool approx_equal(const MixedAction& other, double tol = kProbTol) const;

  // throws ValidationError: negative weights, empty support, sum outside 1 +/- kProbTol
  void check(const std::string& what) const;
};

// Finite two-player stage game with a persistent state: payoff tensors are
// indexed (state, a1, a2) and stored flat.
struct StageGame {
  std::vector<std::string> states;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  std::vector<double> u1;
  std::vector<double> u2;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions1() const { return static_cast<int>(actions1.size()); }
  int num_actions2() const { return static_cast<int>(actions2.size()); }

  double u1_at(int s, int a1, int a2) const { return u1[idx(s, a1, a2)]; }
  double u2_at(int s, int a1, int a2) const { return u2[idx(s, a1, a2)]; }
  std::size_t idx(int s, int a1, int a2) const {
    return (static_cast<std::size_t>(s) * actions1.size() + a1) * actions2.size() + a2;
  }

  int state_index(const std::string& label) const;    // -1 when absent
  int action1_index(const std::string& label) const;  // -1 when absent
  int action2_index(const std::string& label) const;  // -1 when absent

  double max_abs_u1() const;
  double max_abs_u2() const;

  // throws ValidationError on dimension mismatches or empty label lists
  void check() const;
};

// sum_theta sum_a1 phi(theta) alpha1(a1) u(theta, a1, a2)
double expected_payoff(const StageGame& g, std::span<const double> u,
                       std::span<const double> phi, const MixedAction& alpha1, int a2);

// per-a2 expected u2 given a belief over states and player 1's mixed action
std::vector<double> reply_values(const StageGame& g, std::span<const double> phi,
                                 const MixedAction& alpha1);

// argmax set over a2 with inclusion ties at tolerance `tol`
std::vector<int> best_reply_set(const StageGame& g, std::span<const double> phi,
                                const MixedAction& alpha1, double tol = kTieTol);

// best replies in a single state (point-mass belief)
std::vector<int> best_reply_set_state(const StageGame& g, int state,
                                      const MixedAction& alpha1, double tol = kTieTol);

}  // namespace repgame
