#include "repgame/strategy.hpp"

#include "repgame/error.hpp"

namespace repgame {

bool Machine::a2_sensitive(int n1, int n2) const {
  for (const auto& st : states)
    for (int a1 = 0; a1 < n1; ++a1)
      for (int a2 = 1; a2 < n2; ++a2)
        if (st.next[a1 * n2 + a2] != st.next[a1 * n2]) return true;
  return false;
}

void Machine::check(int n1, int n2, const std::string& what) const {
  if (states.empty()) throw ValidationError(what + ": machine has no states");
  if (initial < 0 || initial >= static_cast<int>(states.size()))
    throw ValidationError(what + ": bad initial state");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& st = states[i];
    st.play.check(what + " state " + std::to_string(i));
    if (st.play.size() != n1)
      throw ValidationError(what + ": output action has wrong dimension");
    if (st.next.size() != static_cast<std::size_t>(n1 * n2))
      throw ValidationError(what + ": transition table is not total");
    for (int t : st.next)
      if (t < 0 || t >= static_cast<int>(states.size()))
        throw ValidationError(what + ": transition to unknown state");
  }
}

Machine Machine::stationary(const MixedAction& play, int n1, int n2) {
  Machine m;
  MachineState st;
  st.play = play;
  st.next.assign(static_cast<std::size_t>(n1) * n2, 0);
  m.states.push_back(std::move(st));
  return m;
}

Machine Machine::clock(const std::vector<MixedAction>& seq, int loop_from, int n1, int n2) {
  Machine m;
  const int n = static_cast<int>(seq.size());
  for (int t = 0; t < n; ++t) {
    MachineState st;
    st.play = seq[t];
    const int next = t + 1 < n ? t + 1 : loop_from;
    st.next.assign(static_cast<std::size_t>(n1) * n2, next);
    m.states.push_back(std::move(st));
  }
  return m;
}

void Profile::check(const ReputationScenario& s) const {
  const int n1 = s.game.num_actions1();
  const int n2 = s.game.num_actions2();
  if (static_cast<int>(player1.size()) != s.num_states())
    throw ValidationError("profile: needs a strategy per state");
  for (int st = 0; st < s.num_states(); ++st) {
    const auto& branches = player1[st];
    if (branches.empty())
      throw ValidationError("profile: state " + s.game.states[st] + " has no branches");
    double total = 0.0;
    for (std::size_t b = 0; b < branches.size(); ++b) {
      if (branches[b].weight < -1e-15)
        throw ValidationError("profile: negative branch weight");
      total += branches[b].weight;
      branches[b].machine.check(n1, n2, "profile " + s.game.states[st] + " branch " +
                                            std::to_string(b));
    }
    if (std::abs(total - 1.0) > kProbTol)
      throw ValidationError("profile: branch weights for " + s.game.states[st] +
                            " sum to " + std::to_string(total));
  }
  if (!player2.myopic) {
    player2.machine.check(n2, n1, "profile player 2");
    // player 2's machine observes (a1, a2): transitions indexed [a1 * n2 + a2]
    for (const auto& st : player2.machine.states)
      if (st.next.size() != static_cast<std::size_t>(n1 * n2))
        throw ValidationError("profile player 2: transition table is not total");
  }
}

bool Profile::player1_a2_insensitive(const ReputationScenario& s) const {
  const int n1 = s.game.num_actions1();
  const int n2 = s.game.num_actions2();
  for (const auto& branches : player1)
    for (const auto& b : branches)
      if (b.machine.a2_sensitive(n1, n2)) return false;
  return true;
}

}  // namespace repgame
