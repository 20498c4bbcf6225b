#include "repgame/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "repgame/error.hpp"
#include "repgame/rng.hpp"

namespace repgame {

long t_budget_periods(double mu_alpha, double chi, double eps) {
  if (!(mu_alpha > 0.0 && mu_alpha < 1.0)) throw ValidationError("t_budget: mu in (0,1)");
  if (eps <= 0.0) throw ValidationError("t_budget: eps > 0");
  return static_cast<long>(std::ceil(-2.0 * (chi + eps) * std::log(mu_alpha) /
                                     (eps * eps * eps)));
}

double doob_floor(double chi, double eps) { return eps / (chi + eps); }

double SurvivalTable::survival_at(std::span<const int> supp_path) const {
  int node = root;
  for (int pos : supp_path) {
    node = nodes[node].child[pos];
    if (node < 0) return 0.0;
  }
  return nodes[node].surv;
}

SurvivalTable survival_probabilities(const ReputationScenario& s, const Profile& p,
                                     const MixedAction& a1star, const RegionSpec& spec,
                                     double eps, int horizon, long node_budget) {
  p.check(s);
  if (!p.player1_a2_insensitive(s))
    throw BudgetError("survival_probabilities: player-1 machines must ignore a2 "
                      "(belief-state collapsing requires it)");
  if (eps <= 0.0 || horizon < 1)
    throw ValidationError("survival_probabilities: eps > 0 and horizon >= 1 required");
  const int a_star = s.find_commitment_action(a1star);
  if (a_star < 0) throw ValidationError("survival_probabilities: unknown commitment action");

  const double band = spec.chi + eps;
  SurvivalTable table;
  table.spec = spec;
  table.eps = eps;
  table.horizon = horizon;
  table.supp = a1star.support();
  for (int a : table.supp) table.supp_prob.push_back(a1star.p[a]);

  BeliefState root(s, p);
  if (!(root.chi(a_star, spec) < band))
    throw ValidationError("survival_probabilities: chi at the empty history is already "
                          ">= chi + eps; the band event is empty");

  // forward pass, one level at a time, collapsing by (machine states, posterior)
  std::vector<BeliefState> level_beliefs{root};
  std::vector<int> level_ids;
  table.nodes.push_back({0, root.chi(a_star, spec), 0.0, {}});
  table.nodes[0].child.assign(table.supp.size(), -1);
  level_ids.push_back(0);
  table.root = 0;

  // a representative a2 for machine bookkeeping; beliefs ignore it by precondition
  const int a2_rep = 0;

  for (int t = 0; t < horizon; ++t) {
    std::vector<BeliefState> next_beliefs;
    std::vector<int> next_ids;
    std::unordered_map<std::uint64_t, int> index;
    for (std::size_t i = 0; i < level_beliefs.size(); ++i) {
      const int node_id = level_ids[i];
      for (std::size_t pos = 0; pos < table.supp.size(); ++pos) {
        BeliefState child = level_beliefs[i];
        child.step(table.supp[pos], a2_rep);
        const double chi = child.chi(a_star, spec);
        if (!(chi < band)) {
          table.nodes[node_id].child[pos] = -1;
          continue;
        }
        const std::uint64_t key = child.key();
        auto it = index.find(key);
        int child_id;
        if (it == index.end()) {
          child_id = static_cast<int>(table.nodes.size());
          SurvivalNode node;
          node.t = t + 1;
          node.chi = chi;
          node.child.assign(table.supp.size(), -1);
          table.nodes.push_back(std::move(node));
          index.emplace(key, child_id);
          next_beliefs.push_back(std::move(child));
          next_ids.push_back(child_id);
          if (static_cast<long>(table.nodes.size()) > node_budget)
            throw BudgetError(
                "survival_probabilities: node budget exceeded (" +
                std::to_string(node_budget) + "); lower the horizon or raise the budget");
        } else {
          child_id = it->second;
        }
        table.nodes[node_id].child[pos] = child_id;
      }
    }
    level_beliefs = std::move(next_beliefs);
    level_ids = std::move(next_ids);
  }
  table.collapsed_states = static_cast<long>(table.nodes.size());

  // backward pass
  for (auto it = table.nodes.rbegin(); it != table.nodes.rend(); ++it) {
    SurvivalNode& node = *it;
    if (node.t == horizon) {
      node.surv = 1.0;
      continue;
    }
    double surv = 0.0;
    for (std::size_t pos = 0; pos < table.supp.size(); ++pos)
      if (node.child[pos] >= 0) surv += table.supp_prob[pos] * table.nodes[node.child[pos]].surv;
    node.surv = surv;
  }
  return table;
}

DeviationPlan construct_deviation(const ReputationScenario& s, const Profile& p,
                                  const MixedAction& a1star, const RegionSpec& spec,
                                  double eps, int horizon, long node_budget) {
  const SurvivalTable table =
      survival_probabilities(s, p, a1star, spec, eps, horizon, node_budget);
  if (table.root_survival() <= 0.0)
    throw ValidationError("construct_deviation: root survival is zero");

  DeviationPlan plan;
  plan.supp = table.supp;
  plan.supp_prob = table.supp_prob;
  plan.spec = spec;
  plan.eps = eps;
  plan.horizon = horizon;
  plan.root = table.root;
  plan.root_survival = table.root_survival();
  plan.nodes.resize(table.nodes.size());
  for (std::size_t i = 0; i < table.nodes.size(); ++i) {
    const SurvivalNode& src = table.nodes[i];
    PlanNode& dst = plan.nodes[i];
    dst.t = src.t;
    dst.chi = src.chi;
    dst.child = src.child;
    if (src.t == table.horizon) continue;  // leaves: fallback law applies beyond
    double total = 0.0;
    for (std::size_t pos = 0; pos < table.supp.size(); ++pos) {
      if (src.child[pos] < 0) continue;
      dst.allowed.push_back(static_cast<int>(pos));
      total += table.supp_prob[pos] * table.nodes[src.child[pos]].surv;
    }
    if (dst.allowed.empty()) continue;  // unreachable inside the band
    if (total <= 0.0) {
      // truncation artifact: every allowed continuation dies before the horizon
      dst.dead_end = true;
      ++plan.dead_ends;
      double mass = 0.0;
      for (int pos : dst.allowed) mass += table.supp_prob[pos];
      for (int pos : dst.allowed) dst.prob.push_back(table.supp_prob[pos] / mass);
      continue;
    }
    for (int pos : dst.allowed)
      dst.prob.push_back(table.supp_prob[pos] * table.nodes[src.child[pos]].surv / total);
  }
  return plan;
}

namespace {
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}
}  // namespace

DeviationVerifyReport verify_deviation(const ReputationScenario& s, const Profile& p,
                                       const DeviationPlan& plan, const MixedAction& a1star,
                                       const DeviationVerifyConfig& cfg) {
  const int a_star = s.find_commitment_action(a1star);
  const double band = plan.spec.chi + plan.eps;
  const int nsupp = static_cast<int>(plan.supp.size());

  struct PerRep {
    long violations = 0;
    bool freq_close = true;
    int pred_far = 0;
    int fallback = 0;
  };
  std::vector<PerRep> rows(cfg.replications);

  parallel_for(cfg.replications, cfg.threads, [&](int rep) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(rep));
    BeliefState belief(s, p);
    int node = plan.root;
    PerRep row;
    std::vector<double> freq(s.game.num_actions1(), 0.0);
    std::vector<double> w(nsupp);
    double disc = 1.0;
    for (int t = 0; t < cfg.horizon; ++t) {
      const MixedAction pred = belief.predicted_action();
      if (a1star.l1_distance(pred) > plan.eps) ++row.pred_far;

      int pos;
      if (node >= 0 && !plan.nodes[node].allowed.empty()) {
        const PlanNode& pn = plan.nodes[node];
        const int k = rng.categorical(pn.prob);
        pos = pn.allowed[k];
      } else {
        // beyond the table (or at a horizon leaf): band-safe restriction of a1star
        ++row.fallback;
        double total = 0.0;
        for (int i = 0; i < nsupp; ++i) {
          BeliefState probe = belief;
          probe.step(plan.supp[i], 0);
          w[i] = probe.chi(a_star, plan.spec) < band ? plan.supp_prob[i] : 0.0;
          total += w[i];
        }
        pos = total > 0.0 ? rng.categorical(w) : rng.categorical(plan.supp_prob);
      }

      const int a1 = plan.supp[pos];
      belief.step(a1, 0);
      if (!(belief.chi(a_star, plan.spec) < band)) ++row.violations;
      node = plan.step(node, pos);

      freq[a1] += (1.0 - cfg.delta) * disc;
      disc *= cfg.delta;
    }
    const double norm = 1.0 - std::pow(cfg.delta, cfg.horizon);
    for (int a = 0; a < s.game.num_actions1(); ++a)
      if (std::abs(freq[a] / norm - a1star.p[a]) >= cfg.freq_eps) row.freq_close = false;
    rows[rep] = row;
  });

  DeviationVerifyReport rep;
  rep.root_survival = plan.root_survival;
  rep.doob_floor_value = doob_floor(plan.spec.chi, plan.eps);
  rep.t_budget = t_budget_periods(s.commitment_mass(a_star), plan.spec.chi, plan.eps);
  long close = 0;
  for (const auto& row : rows) {
    rep.band_violations += row.violations;
    rep.mean_pred_far += row.pred_far;
    rep.fallback_periods += row.fallback;
    if (row.freq_close) ++close;
  }
  rep.mean_pred_far /= cfg.replications;
  rep.freq_close_prob = static_cast<double>(close) / cfg.replications;
  rep.beta_empirical = 1.0 - rep.freq_close_prob;
  return rep;
}

ClassificationReport classify_scenario(const ReputationScenario& s, int theta_star,
                                       const MixedAction& a1star) {
  ClassificationReport out;
  out.pure = a1star.is_pure();
  auto [lv, cond] = prior_likelihood(s, a1star);
  out.lambda = lv.lambda;
  out.box_region = lambda_region_membership(s, out.lambda, theta_star, a1star);

  const RegionSpec spec = region_spec_for(s, theta_star, a1star);
  out.chi0 = chi_statistic(out.lambda, spec);
  out.in_underline = out.chi0 < spec.chi;
  double grad = 0.0;
  for (double psi : spec.psi)
    if (!std::isinf(psi) && psi > 0.0) grad += 1.0 / (psi * psi);
  out.underline_distance = grad > 0.0 ? std::abs(spec.chi - out.chi0) / std::sqrt(grad)
                                      : std::numeric_limits<double>::infinity();

  const int a = s.find_commitment_action(a1star);
  out.br_phi_singleton = best_reply_set(s.game, s.phi(a), a1star).size() == 1;

  std::vector<MixedAction> others;
  for (int i = 0; i < s.num_commitment_actions(); ++i)
    if (i != a) others.push_back(s.a1_star[i]);
  out.in_hull_of_others = in_convex_hull(a1star, others);

  if (out.pure) {
    if (out.box_region.side == ClosureSide::inside)
      out.implied_statement = "statement-1";
    else if (out.box_region.side == ClosureSide::outside && out.br_phi_singleton)
      out.implied_statement = "statement-2";
    else
      out.implied_statement = "boundary/uncovered";
  } else {
    if (out.in_underline)
      out.implied_statement = "statement-3";
    else if (out.chi0 > spec.chi && out.br_phi_singleton && !out.in_hull_of_others)
      out.implied_statement = "statement-4";
    else
      out.implied_statement = "boundary/uncovered";
  }
  return out;
}

}  // namespace repgame
