#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repgame/beliefs.hpp"

namespace repgame {

// Which row of the type space generates player 1's actions in a simulation.
struct TrueType {
  enum class Kind { strategic, commitment, from_prior };
  Kind kind = Kind::from_prior;
  int index = -1;  // state index (strategic) or A1* index (commitment)
};

// "strategic:<state>", "commitment:<action spec>", or "prior"
TrueType parse_true_type(const ReputationScenario& s, const std::string& spec);

struct SimConfig {
  double delta = 0.95;
  int horizon = 1000;
  int replications = 1;
  std::uint64_t seed = 1;
  TrueType true_type;
  int reference_action = -1;  // A1* index tracked for lambda/chi/KL; -1 disables
  std::optional<RegionSpec> region;
  double band_lo = 0.0, band_hi = 0.0;
  bool has_band = false;
  double pred_far_eps = -1.0;  // count periods with ||a1* - predicted||_1 > eps
  bool record_periods = false;
  int threads = 1;
};

struct PeriodRow {
  int t;
  int a1, a2;
  double u1;
  double chi;  // NaN when untracked
  double kl;   // NaN when untracked
};

struct TraceRecord {
  int rep = 0;
  int sampled_state = -1;
  int sampled_plan = -1;    // -1 strategic
  int sampled_branch = -1;  // branch index when strategic
  double discounted_payoff = 0.0;
  double truncation_remainder = 0.0;  // delta^T * max|u1|
  std::vector<double> discounted_freq;  // normalized by (1 - delta^T)
  int upcrossings = 0;
  double kl_sum = 0.0;
  int pred_far_count = 0;
  bool off_path = false;
  int off_path_t = -1;
  long pinsker_violations = 0;
  std::vector<PeriodRow> periods;
};

struct SimSummary {
  int reps = 0;
  double mean_payoff = 0.0, payoff_stddev = 0.0;
  std::vector<double> mean_freq;
  double mean_kl_sum = 0.0, kl_sum_stddev = 0.0;
  double mean_pred_far = 0.0, pred_far_stddev = 0.0;
  double p_no_upcrossing = 0.0;
  long pinsker_violations = 0;
  long off_path_traces = 0;
  double truncation_remainder = 0.0;
};

std::pair<std::vector<TraceRecord>, SimSummary> simulate(const ReputationScenario& s,
                                                         const Profile& p,
                                                         const SimConfig& cfg);

// Exact tree walk of E[lambda_{t+1} | h^t] <= lambda_t under the commitment
// measure; horizon capped at 8.
struct SupermartingaleReport {
  double max_violation = 0.0;
  long nodes = 0;
  int horizon = 0;
};
SupermartingaleReport supermartingale_check(const ReputationScenario& s, const Profile& p,
                                            const MixedAction& a1star, int horizon);

// Tail probabilities of the discounted frequency of i.i.d. draws from a1star.
struct FrequencyTailReport {
  double delta = 0.0;
  int reps = 0;
  long horizon = 0;
  double remainder = 0.0;  // delta^horizon
  std::vector<double> etas;
  std::vector<double> mean_freq;               // per action (raw truncated sums)
  std::vector<std::vector<double>> tail_prob;  // [action][eta]
};
FrequencyTailReport discounted_frequency_concentration(
    const MixedAction& a1star, double delta, int reps, std::uint64_t seed,
    std::vector<double> etas = {0.02, 0.05, 0.1, 0.2}, long horizon = -1, int threads = 1);

// d(p || q) in nats over p's support; +infinity when q vanishes there
double kl_divergence(const MixedAction& p, const MixedAction& q);

}  // namespace repgame
