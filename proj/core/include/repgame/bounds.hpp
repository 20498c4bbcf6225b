#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "repgame/beliefs.hpp"
#include "repgame/simulate.hpp"

namespace repgame {

// ceil(-2 (chi + eps) ln mu / eps^3), the expected-period budget in nats
long t_budget_periods(double mu_alpha, double chi, double eps);

// eps / (chi + eps): lower bound on the probability of zero upcrossings
double doob_floor(double chi, double eps);

// Probability, under the commitment measure truncated at `horizon`, that the
// chi statistic stays strictly below chi + eps from each history onward.
// Histories are collapsed by (machine states, posterior); the truncated value
// overestimates the infinite-horizon event.
struct SurvivalNode {
  int t = 0;
  double chi = 0.0;
  double surv = 0.0;
  std::vector<int> child;  // per supported action; -1 = out of band
};

struct SurvivalTable {
  std::vector<int> supp;
  std::vector<double> supp_prob;
  std::vector<SurvivalNode> nodes;
  int root = 0;
  RegionSpec spec;
  double eps = 0.0;
  int horizon = 0;
  long collapsed_states = 0;

  double root_survival() const { return nodes[root].surv; }
  // walks a path of supported-action positions; 0 once the band is left
  double survival_at(std::span<const int> supp_path) const;
};

SurvivalTable survival_probabilities(const ReputationScenario& s, const Profile& p,
                                     const MixedAction& a1star, const RegionSpec& spec,
                                     double eps, int horizon,
                                     long node_budget = 4000000);

// The conditioned one-period action laws: at each in-band history, allowed
// actions are the supported actions that keep chi below chi + eps, weighted by
// alpha1star and the downstream survival mass.
struct PlanNode {
  int t = 0;
  double chi = 0.0;
  std::vector<int> allowed;      // supported-action positions
  std::vector<double> prob;      // conditional law over `allowed`
  std::vector<int> child;        // per supported-action position; -1 out of band
  bool dead_end = false;         // truncation artifact: all allowed children had surv 0
};

class DeviationPlan {
 public:
  std::vector<int> supp;
  std::vector<double> supp_prob;
  std::vector<PlanNode> nodes;
  int root = 0;
  RegionSpec spec;
  double eps = 0.0;
  int horizon = 0;
  int dead_ends = 0;
  double root_survival = 0.0;

  // node id after taking supported-action position `pos`; -1 beyond the table
  int step(int node, int pos) const {
    return node < 0 ? -1 : nodes[node].child[pos];
  }
};

DeviationPlan construct_deviation(const ReputationScenario& s, const Profile& p,
                                  const MixedAction& a1star, const RegionSpec& spec,
                                  double eps, int horizon, long node_budget = 4000000);

struct DeviationVerifyConfig {
  int replications = 10000;
  int horizon = 3000;
  std::uint64_t seed = 7;
  double delta = 0.999;
  double freq_eps = 0.1;  // closeness target for discounted frequencies
  int threads = 1;
};

struct DeviationVerifyReport {
  long band_violations = 0;       // histories reached with chi >= chi + eps
  double freq_close_prob = 0.0;   // P(every action's discounted freq within freq_eps)
  double beta_empirical = 0.0;    // 1 - freq_close_prob
  double mean_pred_far = 0.0;     // mean periods with ||a1* - predicted||_1 > eps
  long t_budget = 0;
  double doob_floor_value = 0.0;
  double root_survival = 0.0;
  int fallback_periods = 0;       // periods simulated beyond the plan horizon
};

DeviationVerifyReport verify_deviation(const ReputationScenario& s, const Profile& p,
                                       const DeviationPlan& plan, const MixedAction& a1star,
                                       const DeviationVerifyConfig& cfg);

// Theorem-side classification of (theta_star, a1star) with boundary distances.
struct ClassificationReport {
  bool pure = false;
  std::vector<double> lambda;
  LambdaMembership box_region;       // Lambda via vertex enumeration
  double chi0 = 0.0;                 // against psi*, chi = 1
  bool in_underline = false;
  double underline_distance = 0.0;   // |1 - chi0| scaled by the gradient norm
  bool br_phi_singleton = false;
  bool in_hull_of_others = false;
  std::string implied_statement;     // "statement-1" .. "statement-4", "boundary/uncovered"
};

ClassificationReport classify_scenario(const ReputationScenario& s, int theta_star,
                                       const MixedAction& a1star);

}  // namespace repgame
