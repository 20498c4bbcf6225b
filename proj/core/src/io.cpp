#include "repgame/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "repgame/error.hpp"

namespace repgame {

using nlohmann::json;

double parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return std::stod(text);
    const double num = std::stod(text.substr(0, slash));
    const double den = std::stod(text.substr(slash + 1));
    if (den == 0.0) throw ParseError("rational with zero denominator: " + text);
    return num / den;
  } catch (const std::invalid_argument&) {
    throw ParseError("not a number: " + text);
  } catch (const std::out_of_range&) {
    throw ParseError("number out of range: " + text);
  }
}

namespace {

double number_from(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ParseError(where + ": expected a number or rational string");
}

std::vector<double> tensor_from(const json& j, const StageGame& g, const std::string& name) {
  std::vector<double> out;
  if (!j.is_array() || j.size() != g.states.size())
    throw ParseError(name + ": expected one block per state");
  for (std::size_t s = 0; s < j.size(); ++s) {
    const json& block = j[s];
    if (!block.is_array() || block.size() != g.actions1.size())
      throw ParseError(name + ": expected one row per player-1 action");
    for (std::size_t a1 = 0; a1 < block.size(); ++a1) {
      const json& row = block[a1];
      if (!row.is_array() || row.size() != g.actions2.size())
        throw ParseError(name + ": expected one entry per player-2 action");
      for (std::size_t a2 = 0; a2 < row.size(); ++a2)
        out.push_back(number_from(row[a2], name));
    }
  }
  return out;
}

json tensor_to(const std::vector<double>& v, const StageGame& g) {
  json out = json::array();
  std::size_t i = 0;
  for (std::size_t s = 0; s < g.states.size(); ++s) {
    json block = json::array();
    for (std::size_t a1 = 0; a1 < g.actions1.size(); ++a1) {
      json row = json::array();
      for (std::size_t a2 = 0; a2 < g.actions2.size(); ++a2) row.push_back(v[i++]);
      block.push_back(std::move(row));
    }
    out.push_back(std::move(block));
  }
  return out;
}

MixedAction mixed_from(const json& j, const StageGame& g, const std::string& where) {
  MixedAction a;
  a.p.assign(g.actions1.size(), 0.0);
  if (!j.is_object()) throw ParseError(where + ": expected {action: prob}");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const int idx = g.action1_index(it.key());
    if (idx < 0) throw ParseError(where + ": unknown action " + it.key());
    a.p[idx] = number_from(it.value(), where);
  }
  return a;
}

json mixed_to(const MixedAction& a, const std::vector<std::string>& labels) {
  json out = json::object();
  for (int i = 0; i < a.size(); ++i)
    if (a.p[i] != 0.0) out[labels[i]] = a.p[i];
  return out;
}

json machine_to(const Machine& m, const ReputationScenario& s, bool player2) {
  const auto& out_labels = player2 ? s.game.actions2 : s.game.actions1;
  const int n2 = s.game.num_actions2();
  json jm;
  jm["initial"] = m.initial;
  json states = json::array();
  for (const auto& st : m.states) {
    json js;
    js["play"] = mixed_to(st.play, out_labels);
    json next = json::object();
    for (int a1 = 0; a1 < s.game.num_actions1(); ++a1)
      for (int a2 = 0; a2 < n2; ++a2)
        next[s.game.actions1[a1] + "|" + s.game.actions2[a2]] = st.next[a1 * n2 + a2];
    js["next"] = std::move(next);
    if (st.has_belief) {
      json belief = json::object();
      for (int c = 0; c <= s.prior.num_plans; ++c)
        for (int t = 0; t < s.num_states(); ++t) {
          const double w = st.belief[static_cast<std::size_t>(c) * s.num_states() + t];
          if (w != 0.0) {
            const std::string who = c == 0 ? "strategic" : s.commitments.plans[c - 1].name;
            belief[s.game.states[t] + "," + who] = w;
          }
        }
      js["belief"] = std::move(belief);
    }
    states.push_back(std::move(js));
  }
  jm["states"] = std::move(states);
  return jm;
}

Machine machine_from(const json& jm, const ReputationScenario& s, bool player2,
                     const std::string& where) {
  const auto& out_labels = player2 ? s.game.actions2 : s.game.actions1;
  const int n1 = s.game.num_actions1();
  const int n2 = s.game.num_actions2();
  Machine m;
  m.initial = jm.value("initial", 0);
  if (!jm.contains("states") || !jm["states"].is_array())
    throw ParseError(where + ": machine needs a states array");
  for (const json& js : jm["states"]) {
    MachineState st;
    st.play.p.assign(out_labels.size(), 0.0);
    const json& play = js.at("play");
    for (auto it = play.begin(); it != play.end(); ++it) {
      int idx = -1;
      for (std::size_t k = 0; k < out_labels.size(); ++k)
        if (out_labels[k] == it.key()) idx = static_cast<int>(k);
      if (idx < 0) throw ParseError(where + ": unknown action " + it.key());
      st.play.p[idx] = number_from(it.value(), where);
    }
    st.next.assign(static_cast<std::size_t>(n1) * n2, -1);
    if (js.contains("next")) {
      const json& next = js["next"];
      // precedence: exact "a1|a2" > "a1" > "*"
      if (next.contains("*"))
        st.next.assign(st.next.size(), next["*"].get<int>());
      for (int a1 = 0; a1 < n1; ++a1) {
        const auto a1_it = next.find(s.game.actions1[a1]);
        if (a1_it != next.end())
          for (int a2 = 0; a2 < n2; ++a2) st.next[a1 * n2 + a2] = a1_it->get<int>();
      }
      for (int a1 = 0; a1 < n1; ++a1)
        for (int a2 = 0; a2 < n2; ++a2) {
          const auto pair_it = next.find(s.game.actions1[a1] + "|" + s.game.actions2[a2]);
          if (pair_it != next.end()) st.next[a1 * n2 + a2] = pair_it->get<int>();
        }
    }
    for (int& t : st.next)
      if (t < 0) throw ParseError(where + ": transition table is not total");
    if (js.contains("belief")) {
      st.has_belief = true;
      st.belief.assign(static_cast<std::size_t>(s.prior.num_plans + 1) * s.num_states(), 0.0);
      for (auto it = js["belief"].begin(); it != js["belief"].end(); ++it) {
        const auto comma = it.key().find(',');
        if (comma == std::string::npos) throw ParseError(where + ": belief key needs 'state,who'");
        const int t = s.game.state_index(it.key().substr(0, comma));
        const std::string who = it.key().substr(comma + 1);
        if (t < 0) throw ParseError(where + ": unknown state in belief key " + it.key());
        int c = -1;
        if (who == "strategic") {
          c = 0;
        } else {
          for (std::size_t pl = 0; pl < s.commitments.plans.size(); ++pl)
            if (s.commitments.plans[pl].name == who) c = 1 + static_cast<int>(pl);
        }
        if (c < 0) throw ParseError(where + ": unknown characteristic " + who);
        st.belief[static_cast<std::size_t>(c) * s.num_states() + t] = number_from(it.value(), where);
      }
    }
    m.states.push_back(std::move(st));
  }
  return m;
}

}  // namespace

ReputationScenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  ReputationScenario s;
  try {
    s.game.states = j.at("states").get<std::vector<std::string>>();
    s.game.actions1 = j.at("actions1").get<std::vector<std::string>>();
    s.game.actions2 = j.at("actions2").get<std::vector<std::string>>();
    s.game.u1 = tensor_from(j.at("u1"), s.game, "u1");
    s.game.u2 = tensor_from(j.at("u2"), s.game, "u2");
    for (const json& jp : j.at("plans")) {
      Plan plan;
      plan.name = jp.at("name").get<std::string>();
      const json& map = jp.at("map");
      for (const auto& state : s.game.states) {
        if (!map.contains(state))
          throw ParseError("plan '" + plan.name + "': missing state " + state);
        plan.by_state.push_back(mixed_from(map[state], s.game, "plan '" + plan.name + "'"));
      }
      s.commitments.plans.push_back(std::move(plan));
    }
    s.prior.num_states = s.game.num_states();
    s.prior.num_plans = static_cast<int>(s.commitments.plans.size());
    s.prior.w.assign(static_cast<std::size_t>(s.prior.num_plans + 1) * s.prior.num_states, 0.0);
    for (auto it = j.at("prior").begin(); it != j.at("prior").end(); ++it) {
      const auto comma = it.key().find(',');
      if (comma == std::string::npos)
        throw ParseError("prior key must be 'state,characteristic': " + it.key());
      const std::string state = it.key().substr(0, comma);
      const std::string who = it.key().substr(comma + 1);
      const int t = s.game.state_index(state);
      if (t < 0) throw ParseError("prior: unknown state " + state);
      int c = -1;
      if (who == "strategic") {
        c = 0;
      } else {
        for (std::size_t pl = 0; pl < s.commitments.plans.size(); ++pl)
          if (s.commitments.plans[pl].name == who) c = 1 + static_cast<int>(pl);
      }
      if (c < 0) throw ParseError("prior: unknown characteristic " + who);
      s.prior.at(t, c) = number_from(it.value(), "prior");
    }
    s.delta = number_from(j.at("delta"), "delta");
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  s.finalize();
  return s;
}

ReputationScenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path));
}

std::string scenario_to_json(const ReputationScenario& s) {
  json j;
  j["states"] = s.game.states;
  j["actions1"] = s.game.actions1;
  j["actions2"] = s.game.actions2;
  j["u1"] = tensor_to(s.game.u1, s.game);
  j["u2"] = tensor_to(s.game.u2, s.game);
  json plans = json::array();
  for (const auto& plan : s.commitments.plans) {
    json jp;
    jp["name"] = plan.name;
    json map = json::object();
    for (int st = 0; st < s.num_states(); ++st)
      map[s.game.states[st]] = mixed_to(plan.by_state[st], s.game.actions1);
    jp["map"] = std::move(map);
    plans.push_back(std::move(jp));
  }
  j["plans"] = std::move(plans);
  json prior = json::object();
  for (int c = 0; c <= s.prior.num_plans; ++c)
    for (int st = 0; st < s.num_states(); ++st) {
      const std::string who = c == 0 ? "strategic" : s.commitments.plans[c - 1].name;
      prior[s.game.states[st] + "," + who] = s.prior.at(st, c);
    }
  j["prior"] = std::move(prior);
  j["delta"] = s.delta;
  return j.dump(2);
}

Profile parse_profile(const std::string& json_text, const ReputationScenario& s) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("profile JSON: ") + e.what());
  }
  Profile p;
  try {
    p.name = j.value("name", "");
    p.player1.resize(s.num_states());
    const json& j1 = j.at("player1");
    for (int st = 0; st < s.num_states(); ++st) {
      const std::string& label = s.game.states[st];
      if (!j1.contains(label)) throw ParseError("profile: missing strategy for " + label);
      for (const json& jb : j1[label]) {
        Branch b;
        b.weight = jb.value("weight", 1.0);
        b.role = jb.value("role", "");
        b.machine = machine_from(jb.at("machine"), s, false, "profile " + label);
        p.player1[st].push_back(std::move(b));
      }
    }
    const json& j2 = j.at("player2");
    if (j2.contains("myopic")) {
      p.player2.myopic = true;
    } else {
      p.player2.myopic = false;
      p.player2.machine = machine_from(j2.at("machine"), s, true, "profile player2");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("profile JSON: ") + e.what());
  }
  p.check(s);
  return p;
}

Profile load_profile(const std::string& path, const ReputationScenario& s) {
  return parse_profile(read_file(path), s);
}

std::string profile_to_json(const Profile& p, const ReputationScenario& s) {
  json j;
  j["name"] = p.name;
  json j1 = json::object();
  for (int st = 0; st < s.num_states(); ++st) {
    json arr = json::array();
    for (const auto& b : p.player1[st]) {
      json jb;
      jb["weight"] = b.weight;
      if (!b.role.empty()) jb["role"] = b.role;
      jb["machine"] = machine_to(b.machine, s, false);
      arr.push_back(std::move(jb));
    }
    j1[s.game.states[st]] = std::move(arr);
  }
  j["player1"] = std::move(j1);
  if (p.player2.myopic) {
    j["player2"] = json{{"myopic", json::object()}};
  } else {
    j["player2"] = json{{"machine", machine_to(p.player2.machine, s, true)}};
  }
  return j.dump(2);
}

std::string equilibrium_to_json(const EquilibriumMachine& eq) {
  json j;
  j["construction"] = eq.construction;
  j["scenario"] = json::parse(scenario_to_json(eq.scenario));
  j["profile"] = json::parse(profile_to_json(eq.profile, eq.scenario));
  if (eq.has_params) {
    const ConstructionParams& c = eq.params;
    json jp;
    jp["lambda_prime"] = c.lambda_prime;
    jp["a2_prime"] = c.a2_prime;
    jp["eps"] = c.eps;
    jp["eta"] = c.eta;
    jp["kappa"] = c.kappa;
    jp["k_bar"] = c.k_bar;
    jp["k_star"] = c.k_star;
    jp["t1"] = c.t1;
    jp["beta_bar"] = c.beta_bar;
    jp["beta_under"] = c.beta_under;
    jp["mixed_actions"] = c.mixed_actions;
    jp["beta_bar_per"] = c.beta_bar_per;
    jp["rotation_len"] = c.rotation_len;
    jp["dev_action"] = c.dev_action;
    jp["a1_star"] = c.a1_star;
    json hats = json::array();
    for (const auto& h : c.alpha_hat) hats.push_back(mixed_to(h, eq.scenario.game.actions1));
    jp["alpha_hat"] = std::move(hats);
    j["params"] = std::move(jp);
  }
  return j.dump(2);
}

EquilibriumMachine load_equilibrium(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("equilibrium JSON: ") + e.what());
  }
  EquilibriumMachine eq;
  eq.construction = j.value("construction", "");
  eq.scenario = parse_scenario(j.at("scenario").dump());
  eq.profile = parse_profile(j.at("profile").dump(), eq.scenario);
  if (j.contains("params")) {
    const json& jp = j["params"];
    eq.has_params = true;
    ConstructionParams& c = eq.params;
    c.lambda_prime = jp.at("lambda_prime").get<std::vector<double>>();
    c.a2_prime = jp.at("a2_prime").get<int>();
    c.eps = jp.at("eps").get<double>();
    c.eta = jp.at("eta").get<double>();
    c.kappa = jp.at("kappa").get<double>();
    c.k_bar = jp.at("k_bar").get<int>();
    c.k_star = jp.at("k_star").get<int>();
    c.t1 = jp.at("t1").get<int>();
    c.beta_bar = jp.at("beta_bar").get<double>();
    c.beta_under = jp.at("beta_under").get<double>();
    c.mixed_actions = jp.at("mixed_actions").get<std::vector<int>>();
    c.beta_bar_per = jp.at("beta_bar_per").get<std::vector<double>>();
    c.rotation_len = jp.at("rotation_len").get<int>();
    c.dev_action = jp.at("dev_action").get<int>();
    c.a1_star = jp.at("a1_star").get<int>();
    for (const json& h : jp.at("alpha_hat"))
      c.alpha_hat.push_back(mixed_from(h, eq.scenario.game, "alpha_hat"));
  }
  return eq;
}

std::string plan_to_json(const DeviationPlan& plan, const ReputationScenario& s) {
  json j;
  json supp = json::array();
  for (int a : plan.supp) supp.push_back(s.game.actions1[a]);
  j["support"] = std::move(supp);
  j["chi"] = plan.spec.chi;
  j["eps"] = plan.eps;
  j["horizon"] = plan.horizon;
  j["root"] = plan.root;
  j["root_survival"] = plan.root_survival;
  j["dead_ends"] = plan.dead_ends;
  json nodes = json::array();
  for (const auto& n : plan.nodes) {
    json jn;
    jn["t"] = n.t;
    jn["chi"] = n.chi;
    json allowed = json::array();
    for (int pos : n.allowed) allowed.push_back(s.game.actions1[plan.supp[pos]]);
    jn["allowed"] = std::move(allowed);
    jn["prob"] = n.prob;
    jn["child"] = n.child;
    if (n.dead_end) jn["dead_end"] = true;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j.dump();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

}  // namespace repgame
