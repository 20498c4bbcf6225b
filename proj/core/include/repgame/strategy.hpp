#pragma once

#include <string>
#include <vector>

#include "repgame/scenario.hpp"

namespace repgame {

// One state of a finite-state strategy machine. Transitions are keyed on the
// observed public action pair; the optional belief annotation supplies a
// posterior over (state, characteristic) for histories every type assigns
// probability zero (the profile, not the engine, decides off-path beliefs).
struct MachineState {
  MixedAction play;
  std::vector<int> next;  // flat [a1 * n2 + a2]
  bool has_belief = false;
  std::vector<double> belief;  // flat (characteristic, state), as in Prior
};

struct Machine {
  std::vector<MachineState> states;
  int initial = 0;

  int next_state(int current, int a1, int a2, int n2) const {
    return states[current].next[a1 * n2 + a2];
  }
  bool a2_sensitive(int n1, int n2) const;
  void check(int n1, int n2, const std::string& what) const;

  static Machine stationary(const MixedAction& play, int n1, int n2);
  // Plays seq[t] in period t, then cycles through seq[loop_from..] forever.
  // Transitions ignore observations (a calendar clock).
  static Machine clock(const std::vector<MixedAction>& seq, int loop_from, int n1, int n2);
};

// Repeated-game mixed strategy of one strategic type: a probability mixture
// over machines, resolved once before period 0.
struct Branch {
  double weight = 1.0;
  Machine machine;
  std::string role;  // free-form tag, e.g. "shadow:#1"
};

struct Player2Strategy {
  bool myopic = false;  // best reply to the current posterior, first-index ties
  Machine machine;      // used when !myopic
};

struct Profile {
  std::string name;
  std::vector<std::vector<Branch>> player1;  // per state
  Player2Strategy player2;

  void check(const ReputationScenario& s) const;
  // true when every player-1 machine ignores a2 in its transitions
  bool player1_a2_insensitive(const ReputationScenario& s) const;
};

}  // namespace repgame
