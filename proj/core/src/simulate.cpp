#include "repgame/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "repgame/error.hpp"
#include "repgame/rng.hpp"

namespace repgame {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}
}  // namespace

TrueType parse_true_type(const ReputationScenario& s, const std::string& spec) {
  TrueType out;
  if (spec == "prior" || spec == "sample-from-prior") {
    out.kind = TrueType::Kind::from_prior;
    return out;
  }
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ValidationError("true type must be 'prior', 'strategic:<state>' or "
                          "'commitment:<action>': " + spec);
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "strategic") {
    const int st = s.game.state_index(arg);
    if (st < 0) throw ValidationError("unknown state: " + arg);
    out.kind = TrueType::Kind::strategic;
    out.index = st;
  } else if (kind == "commitment") {
    out.kind = TrueType::Kind::commitment;
    out.index = s.resolve_commitment_action(arg);
  } else {
    throw ValidationError("unknown true-type kind: " + kind);
  }
  return out;
}

double kl_divergence(const MixedAction& p, const MixedAction& q) {
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p.p[i] <= 0.0) continue;
    if (q.p[i] <= 0.0) return std::numeric_limits<double>::infinity();
    d += p.p[i] * std::log(p.p[i] / q.p[i]);
  }
  return std::max(d, 0.0);
}

namespace {

struct UpcrossCounter {
  double lo, hi;
  bool armed;
  int count = 0;
  UpcrossCounter(double a, double b, double x0) : lo(a), hi(b), armed(x0 <= a) {
    if (x0 >= b && armed) {  // degenerate band
      ++count;
      armed = false;
    }
  }
  void observe(double x) {
    if (armed && x >= hi) {
      ++count;
      armed = false;
    } else if (!armed && x <= lo) {
      armed = true;
    }
  }
};

// Player 1's action sampler for the configured true row.
struct TrueRow {
  const ReputationScenario* s;
  const Profile* p;
  int state = 0;        // realized payoff state
  int plan = -1;        // commitment plan cell, -1 strategic
  int branch = -1;      // strategic branch
  int a_star = -1;      // commitment action index when committed
  int mstate = 0;

  const MixedAction& current_play() const {
    if (plan >= 0) return s->commitments.plans[plan].by_state[state];
    return p->player1[state][branch].machine.states[mstate].play;
  }
  void advance(int a1, int a2) {
    if (plan >= 0) return;
    const Machine& m = p->player1[state][branch].machine;
    mstate = m.next_state(mstate, a1, a2, s->game.num_actions2());
  }
};

TrueRow sample_true_row(const ReputationScenario& s, const Profile& p, const TrueType& tt,
                        Rng& rng) {
  TrueRow row{&s, &p};
  switch (tt.kind) {
    case TrueType::Kind::strategic: {
      row.state = tt.index;
      const auto& branches = p.player1[row.state];
      std::vector<double> w(branches.size());
      for (std::size_t b = 0; b < branches.size(); ++b) w[b] = branches[b].weight;
      row.branch = rng.categorical(w);
      row.mstate = branches[row.branch].machine.initial;
      break;
    }
    case TrueType::Kind::commitment: {
      row.a_star = tt.index;
      const std::vector<double> phi = s.phi(tt.index);
      row.state = rng.categorical(phi);
      // any plan playing a_star in that state; identical play, pick the first
      for (std::size_t pl = 0; pl < s.commitments.plans.size(); ++pl)
        if (s.plan_cell[pl][row.state] == tt.index) {
          row.plan = static_cast<int>(pl);
          break;
        }
      break;
    }
    case TrueType::Kind::from_prior: {
      std::vector<double> w(s.prior.w.begin(), s.prior.w.end());
      const int cell = rng.categorical(w);
      row.state = cell % s.num_states();
      const int ch = cell / s.num_states();
      if (ch == 0) {
        const auto& branches = p.player1[row.state];
        std::vector<double> bw(branches.size());
        for (std::size_t b = 0; b < branches.size(); ++b) bw[b] = branches[b].weight;
        row.branch = rng.categorical(bw);
        row.mstate = branches[row.branch].machine.initial;
      } else {
        row.plan = ch - 1;
      }
      break;
    }
  }
  return row;
}

}  // namespace

std::pair<std::vector<TraceRecord>, SimSummary> simulate(const ReputationScenario& s,
                                                         const Profile& p,
                                                         const SimConfig& cfg) {
  p.check(s);
  if (cfg.horizon < 1 || cfg.replications < 1)
    throw ValidationError("simulate: horizon and replications must be >= 1");
  const int n1 = s.game.num_actions1();
  const double max_u1 = s.game.max_abs_u1();
  const double tail = std::pow(cfg.delta, cfg.horizon);
  const MixedAction* ref_action =
      cfg.reference_action >= 0 ? &s.a1_star[cfg.reference_action] : nullptr;

  std::vector<TraceRecord> traces(cfg.replications);

  parallel_for(cfg.replications, cfg.threads, [&](int rep) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(rep));
    TraceRecord tr;
    tr.rep = rep;
    TrueRow row = sample_true_row(s, p, cfg.true_type, rng);
    tr.sampled_state = row.state;
    tr.sampled_plan = row.plan;
    tr.sampled_branch = row.branch;

    BeliefState belief(s, p);
    int p2_mstate = p.player2.myopic ? -1 : p.player2.machine.initial;

    double disc = 1.0;
    double payoff = 0.0;
    std::vector<double> freq(n1, 0.0);
    std::optional<UpcrossCounter> upcross;
    if (cfg.has_band && cfg.region && cfg.reference_action >= 0)
      upcross.emplace(cfg.band_lo, cfg.band_hi,
                      belief.chi(cfg.reference_action, *cfg.region));

    for (int t = 0; t < cfg.horizon; ++t) {
      const MixedAction pred = belief.predicted_action();

      double kl = kNaN;
      if (ref_action != nullptr) {
        kl = kl_divergence(*ref_action, pred);
        tr.kl_sum += kl;
        if (ref_action->l1_distance(pred) > std::sqrt(2.0 * kl) + 1e-12)
          ++tr.pinsker_violations;
        if (cfg.pred_far_eps > 0.0 && ref_action->l1_distance(pred) > cfg.pred_far_eps)
          ++tr.pred_far_count;
      }

      const MixedAction& play1 = row.current_play();
      const int a1 = rng.categorical(play1.p);
      int a2;
      if (p.player2.myopic) {
        a2 = belief.myopic_reply();
      } else {
        const MixedAction& play2 = p.player2.machine.states[p2_mstate].play;
        a2 = rng.categorical(play2.p);
      }

      const double u1 = s.game.u1_at(row.state, a1, a2);
      payoff += (1.0 - cfg.delta) * disc * u1;
      freq[a1] += (1.0 - cfg.delta) * disc;

      const bool on_path = belief.try_step(a1, a2);
      if (!on_path && !tr.off_path) {
        tr.off_path = true;
        tr.off_path_t = t;
      }
      row.advance(a1, a2);
      if (!p.player2.myopic)
        p2_mstate = p.player2.machine.next_state(p2_mstate, a1, a2, s.game.num_actions2());

      double chi = kNaN;
      if (cfg.region && cfg.reference_action >= 0 &&
          belief.lambda_defined(cfg.reference_action)) {
        chi = belief.chi(cfg.reference_action, *cfg.region);
        if (upcross) upcross->observe(chi);
      }
      if (cfg.record_periods) tr.periods.push_back({t, a1, a2, u1, chi, kl});
      disc *= cfg.delta;
    }

    tr.discounted_payoff = payoff;
    tr.truncation_remainder = tail * max_u1;
    const double norm = 1.0 - tail;
    for (double& f : freq) f /= norm;
    tr.discounted_freq = std::move(freq);
    tr.upcrossings = upcross ? upcross->count : 0;
    traces[rep] = std::move(tr);
  });

  SimSummary sum;
  sum.reps = cfg.replications;
  sum.mean_freq.assign(n1, 0.0);
  sum.truncation_remainder = tail * max_u1;
  double payoff_sq = 0.0, kl_sq = 0.0, far_sq = 0.0;
  int no_up = 0;
  for (const auto& tr : traces) {
    sum.mean_payoff += tr.discounted_payoff;
    payoff_sq += tr.discounted_payoff * tr.discounted_payoff;
    sum.mean_kl_sum += tr.kl_sum;
    kl_sq += tr.kl_sum * tr.kl_sum;
    sum.mean_pred_far += tr.pred_far_count;
    far_sq += static_cast<double>(tr.pred_far_count) * tr.pred_far_count;
    for (int a = 0; a < n1; ++a) sum.mean_freq[a] += tr.discounted_freq[a];
    if (tr.upcrossings == 0) ++no_up;
    sum.pinsker_violations += tr.pinsker_violations;
    if (tr.off_path) ++sum.off_path_traces;
  }
  const double r = cfg.replications;
  sum.mean_payoff /= r;
  sum.mean_kl_sum /= r;
  sum.mean_pred_far /= r;
  for (double& f : sum.mean_freq) f /= r;
  sum.p_no_upcrossing = no_up / r;
  auto stddev = [&](double sq, double mean) {
    const double var = std::max(0.0, sq / r - mean * mean);
    return std::sqrt(var);
  };
  sum.payoff_stddev = stddev(payoff_sq, sum.mean_payoff);
  sum.kl_sum_stddev = stddev(kl_sq, sum.mean_kl_sum);
  sum.pred_far_stddev = stddev(far_sq, sum.mean_pred_far);
  return {std::move(traces), sum};
}

namespace {

struct TreeWalker {
  const ReputationScenario& s;
  const MixedAction& a1star;
  std::vector<int> supp;
  bool branch_a2;
  const Profile& p;
  double max_violation = 0.0;
  long nodes = 0;

  void walk(const BeliefState& belief, int p2_mstate, int depth) {
    ++nodes;
    if (depth == 0) return;
    // expectation over a1 ~ a1star (and a2 ~ sigma2 when transitions need it)
    const MixedAction* play2 =
        p.player2.myopic ? nullptr : &p.player2.machine.states[p2_mstate].play;
    std::vector<int> a2s;
    std::vector<double> a2w;
    if (p.player2.myopic) {
      a2s.push_back(belief.myopic_reply());
      a2w.push_back(1.0);
    } else if (branch_a2) {
      for (int a2 = 0; a2 < s.game.num_actions2(); ++a2)
        if (play2->p[a2] > 0.0) {
          a2s.push_back(a2);
          a2w.push_back(play2->p[a2]);
        }
    } else {
      int rep = 0;
      for (int a2 = 0; a2 < s.game.num_actions2(); ++a2)
        if (play2->p[a2] > 0.0) {
          rep = a2;
          break;
        }
      a2s.push_back(rep);
      a2w.push_back(1.0);
    }

    const int a_star = s.find_commitment_action(a1star);
    const std::vector<double> lam = belief.lambda(a_star);
    for (std::size_t j = 0; j < a2s.size(); ++j) {
      std::vector<double> expect(s.num_states(), 0.0);
      std::vector<BeliefState> children;
      children.reserve(supp.size());
      for (int a1 : supp) {
        BeliefState child = belief;
        child.step(a1, a2s[j]);
        const std::vector<double> lam_child = child.lambda(a_star);
        for (int st = 0; st < s.num_states(); ++st)
          expect[st] += a1star.p[a1] * lam_child[st];
        children.push_back(std::move(child));
      }
      for (int st = 0; st < s.num_states(); ++st)
        max_violation = std::max(max_violation, expect[st] - lam[st]);
      for (std::size_t c = 0; c < children.size(); ++c) {
        int next2 = p2_mstate;
        if (!p.player2.myopic)
          next2 = p.player2.machine.next_state(p2_mstate, supp[c], a2s[j],
                                               s.game.num_actions2());
        walk(children[c], next2, depth - 1);
      }
    }
  }
};

}  // namespace

SupermartingaleReport supermartingale_check(const ReputationScenario& s, const Profile& p,
                                            const MixedAction& a1star, int horizon) {
  if (horizon > 8) throw BudgetError("supermartingale_check: horizon capped at 8");
  p.check(s);
  TreeWalker walker{s, a1star, a1star.support(), !p.player1_a2_insensitive(s), p};
  BeliefState root(s, p);
  const int p2_init = p.player2.myopic ? -1 : p.player2.machine.initial;
  walker.walk(root, p2_init, horizon);
  return {walker.max_violation, walker.nodes, horizon};
}

FrequencyTailReport discounted_frequency_concentration(const MixedAction& a1star,
                                                       double delta, int reps,
                                                       std::uint64_t seed,
                                                       std::vector<double> etas,
                                                       long horizon, int threads) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ValidationError("discounted_frequency_concentration: delta in (0,1)");
  if (horizon < 0)
    horizon = static_cast<long>(std::ceil(std::log(1e-9) / std::log(delta)));
  const int n1 = a1star.size();

  FrequencyTailReport rep;
  rep.delta = delta;
  rep.reps = reps;
  rep.horizon = horizon;
  rep.remainder = std::pow(delta, static_cast<double>(horizon));
  rep.etas = std::move(etas);
  rep.mean_freq.assign(n1, 0.0);
  rep.tail_prob.assign(n1, std::vector<double>(rep.etas.size(), 0.0));

  std::vector<std::vector<double>> freqs(reps);
  parallel_for(reps, threads, [&](int r) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(r));
    std::vector<double> freq(n1, 0.0);
    double disc = 1.0;
    const double one_minus = 1.0 - delta;
    for (long t = 0; t < horizon; ++t) {
      freq[rng.categorical(a1star.p)] += one_minus * disc;
      disc *= delta;
    }
    freqs[r] = std::move(freq);
  });

  for (int r = 0; r < reps; ++r) {
    for (int a = 0; a < n1; ++a) {
      rep.mean_freq[a] += freqs[r][a] / reps;
      const double dev = std::abs(freqs[r][a] - a1star.p[a]);
      for (std::size_t e = 0; e < rep.etas.size(); ++e)
        if (dev >= rep.etas[e]) rep.tail_prob[a][e] += 1.0 / reps;
    }
  }
  return rep;
}

}  // namespace repgame
