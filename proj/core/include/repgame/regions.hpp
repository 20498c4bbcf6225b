#pragma once

#include <span>
#include <vector>

#include "repgame/scenario.hpp"

namespace repgame {

// Per-state ratio of strategic-type mass to the mass of the commitment type
// playing the reference action.
struct LikelihoodVector {
  std::vector<double> lambda;  // aligned to the state list
  MixedAction reference;       // the commitment action the ratios refer to
};

struct CommitmentConditional {
  std::vector<double> phi;  // belief over states conditional on the commitment type
};

std::pair<LikelihoodVector, CommitmentConditional> prior_likelihood(
    const ReputationScenario& s, const MixedAction& a1star);

// Weighted-reply region parameters: psi per state (+infinity allowed) and a
// positive level chi. Terms with psi = +infinity contribute zero to sums.
struct RegionSpec {
  std::vector<double> psi;
  double chi = 1.0;
};

// a2*-value minus the best competing value at likelihood vector `lambda`;
// positive margin means a2* is the strict argmax.
double lambda_bar_margin(const ReputationScenario& s, std::span<const double> lambda,
                         int theta_star, const MixedAction& a1star);

// strict membership (margin > strictness); exact ties are classified outside
bool in_lambda_bar(const ReputationScenario& s, std::span<const double> lambda,
                   int theta_star, const MixedAction& a1star, double strictness = kTieTol);

// Box quantifier: every lambda' in [0, lambda] lies in the strict region.
// Each strictness inequality is affine in lambda', so the minimum over the box
// is attained at a vertex; all 2^m vertices are evaluated exactly.
bool in_lambda(const ReputationScenario& s, std::span<const double> lambda,
               int theta_star, const MixedAction& a1star, double strictness = kTieTol);

// worst margin across box vertices (positive = strictly inside the box region)
double lambda_box_worst_margin(const ReputationScenario& s, std::span<const double> lambda,
                               int theta_star, const MixedAction& a1star);

// States whose best reply to a1star excludes a2*(theta_star, a1star | u2).
std::vector<int> theta_b_set(const ReputationScenario& s, int theta_star,
                             const MixedAction& a1star);

struct PsiStar {
  double value = 0.0;           // +infinity encoded as std::numeric_limits::infinity
  bool rejected_at_zero = false;  // a2* already loses under phi alone
};

// Largest psi >= 0 keeping a2* in the argmax of u2(phi, a1star, .) + psi u2(theta, a1star, .).
PsiStar psi_star(const ReputationScenario& s, int theta, int theta_star,
                 const MixedAction& a1star);

// psi* per state (infinity outside theta_b) with chi = 1
RegionSpec region_spec_for(const ReputationScenario& s, int theta_star,
                           const MixedAction& a1star);

// sum_theta lambda_theta / psi_theta (infinite psi contributes 0)
double chi_statistic(std::span<const double> lambda, const RegionSpec& spec);

bool in_lambda_underline(std::span<const double> lambda, const RegionSpec& spec);

// Exact small-scale feasibility of target = sum w_i others_i with w >= 0,
// sum w = 1 (Caratheodory subsets solved by Gaussian elimination).
bool in_convex_hull(const MixedAction& target, std::span<const MixedAction> others,
                    double tol = kTieTol);

// (1 - chi0) v + chi0 min_a2 u1(theta_star, a1star, a2)
double imperfect_monitoring_bound(const ReputationScenario& s, int theta_star,
                                  const MixedAction& a1star, double chi0);

enum class ClosureSide { inside, boundary, outside };

struct LambdaMembership {
  bool in_open = false;       // strict membership in the box region
  ClosureSide side = ClosureSide::boundary;
  double worst_margin = 0.0;  // payoff-unit margin at the worst vertex
};

// Three-way classification of lambda against the box region and its closure.
LambdaMembership lambda_region_membership(const ReputationScenario& s,
                                          std::span<const double> lambda, int theta_star,
                                          const MixedAction& a1star);

}  // namespace repgame
