#include "repgame/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repgame/error.hpp"

namespace repgame {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::pair<LikelihoodVector, CommitmentConditional> prior_likelihood(
    const ReputationScenario& s, const MixedAction& a1star) {
  const int a = s.find_commitment_action(a1star);
  if (a < 0) throw ValidationError("prior_likelihood: unknown commitment action");
  const double denom = s.commitment_mass(a);
  if (denom <= 0.0) throw ValidationError("prior_likelihood: zero commitment mass");
  LikelihoodVector lv;
  lv.reference = a1star;
  lv.lambda.resize(s.num_states());
  for (int st = 0; st < s.num_states(); ++st) lv.lambda[st] = s.strategic_mass(st) / denom;
  return {std::move(lv), CommitmentConditional{s.phi(a)}};
}

// Values of u2(phi_{a1*}, a1*, a2) + sum_theta lambda_theta u2(theta, a1*, a2), per a2.
static std::vector<double> weighted_reply_values(const ReputationScenario& s,
                                                 std::span<const double> lambda,
                                                 const MixedAction& a1star) {
  const int a = s.find_commitment_action(a1star);
  if (a < 0) throw ValidationError("unknown commitment action");
  const std::vector<double> phi = s.phi(a);
  std::vector<double> vals = reply_values(s.game, phi, a1star);
  for (int st = 0; st < s.num_states(); ++st) {
    if (lambda[st] == 0.0) continue;
    std::vector<double> point(s.num_states(), 0.0);
    point[st] = 1.0;
    for (int a2 = 0; a2 < s.game.num_actions2(); ++a2)
      vals[a2] += lambda[st] * expected_payoff(s.game, s.game.u2, point, a1star, a2);
  }
  return vals;
}

double lambda_bar_margin(const ReputationScenario& s, std::span<const double> lambda,
                         int theta_star, const MixedAction& a1star) {
  const int a2_star = unique_best_reply(s, theta_star, a1star);
  const std::vector<double> vals = weighted_reply_values(s, lambda, a1star);
  double best_other = -kInf;
  for (int a2 = 0; a2 < s.game.num_actions2(); ++a2)
    if (a2 != a2_star) best_other = std::max(best_other, vals[a2]);
  return vals[a2_star] - best_other;
}

bool in_lambda_bar(const ReputationScenario& s, std::span<const double> lambda,
                   int theta_star, const MixedAction& a1star, double strictness) {
  return lambda_bar_margin(s, lambda, theta_star, a1star) > strictness;
}

double lambda_box_worst_margin(const ReputationScenario& s, std::span<const double> lambda,
                               int theta_star, const MixedAction& a1star) {
  const int m = s.num_states();
  if (m > 20) throw BudgetError("in_lambda: vertex enumeration refuses m > 20 states");
  double worst = kInf;
  std::vector<double> vertex(m, 0.0);
  for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
    for (int st = 0; st < m; ++st) vertex[st] = (mask >> st) & 1 ? lambda[st] : 0.0;
    worst = std::min(worst, lambda_bar_margin(s, vertex, theta_star, a1star));
  }
  return worst;
}

bool in_lambda(const ReputationScenario& s, std::span<const double> lambda,
               int theta_star, const MixedAction& a1star, double strictness) {
  return lambda_box_worst_margin(s, lambda, theta_star, a1star) > strictness;
}

std::vector<int> theta_b_set(const ReputationScenario& s, int theta_star,
                             const MixedAction& a1star) {
  const int a2_star = unique_best_reply(s, theta_star, a1star);
  std::vector<int> out;
  for (int st = 0; st < s.num_states(); ++st) {
    auto set = best_reply_set_state(s.game, st, a1star);
    if (std::find(set.begin(), set.end(), a2_star) == set.end()) out.push_back(st);
  }
  return out;
}

PsiStar psi_star(const ReputationScenario& s, int theta, int theta_star,
                 const MixedAction& a1star) {
  const auto tb = theta_b_set(s, theta_star, a1star);
  if (std::find(tb.begin(), tb.end(), theta) == tb.end()) return {kInf, false};

  const int a2_star = unique_best_reply(s, theta_star, a1star);
  const int a = s.find_commitment_action(a1star);
  const std::vector<double> phi = s.phi(a);
  const std::vector<double> base = reply_values(s.game, phi, a1star);
  std::vector<double> point(s.num_states(), 0.0);
  point[theta] = 1.0;
  const std::vector<double> slope = reply_values(s.game, point, a1star);

  // each a2 traces the line base[a2] + psi * slope[a2]; a2* stays in the argmax
  // until the first competitor with a steeper slope catches up
  double limit = kInf;
  for (int a2 = 0; a2 < s.game.num_actions2(); ++a2) {
    if (a2 == a2_star) continue;
    const double dc = base[a2] - base[a2_star];
    const double ds = slope[a2] - slope[a2_star];
    if (dc > kTieTol) return {0.0, true};  // already losing at psi = 0
    if (ds <= kTieTol) continue;           // never overtakes
    limit = std::min(limit, -dc / ds);
  }
  return {std::max(limit, 0.0), false};
}

RegionSpec region_spec_for(const ReputationScenario& s, int theta_star,
                           const MixedAction& a1star) {
  RegionSpec spec;
  spec.chi = 1.0;
  spec.psi.assign(s.num_states(), kInf);
  for (int st : theta_b_set(s, theta_star, a1star))
    spec.psi[st] = psi_star(s, st, theta_star, a1star).value;
  return spec;
}

double chi_statistic(std::span<const double> lambda, const RegionSpec& spec) {
  double total = 0.0;
  for (std::size_t st = 0; st < lambda.size(); ++st) {
    const double psi = spec.psi[st];
    if (std::isinf(psi)) continue;
    if (psi <= 0.0) {
      if (lambda[st] > 0.0) return kInf;
      continue;
    }
    total += lambda[st] / psi;
  }
  return total;
}

bool in_lambda_underline(std::span<const double> lambda, const RegionSpec& spec) {
  return chi_statistic(lambda, spec) < spec.chi;
}

namespace {

// Solves A w = b (square) in place; returns false when singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& out) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  out.resize(n);
  for (int i = 0; i < n; ++i) out[i] = b[i] / a[i][i];
  return true;
}

}  // namespace

bool in_convex_hull(const MixedAction& target, std::span<const MixedAction> others,
                    double tol) {
  if (others.empty()) return false;
  const int dim = target.size();
  const int n = static_cast<int>(others.size());
  for (const auto& o : others)
    if (o.approx_equal(target, tol)) return true;

  // Caratheodory: some subset of size <= dim describes any hull member.
  // Rows are the dim coordinate equations plus the sum-to-one constraint; a
  // least-squares style exact check on square subsystems is enough at this scale.
  std::vector<int> subset;
  std::vector<std::vector<double>> rows(dim + 1);
  auto try_subset = [&](const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    // pick k independent equations: use sum row plus first k-1 coordinates,
    // then verify the full system on the candidate weights
    for (int eq_start = 0; eq_start + (k - 1) <= dim; ++eq_start) {
      std::vector<std::vector<double>> a(k, std::vector<double>(k));
      std::vector<double> b(k);
      for (int j = 0; j < k; ++j) a[0][j] = 1.0;
      b[0] = 1.0;
      for (int r = 1; r < k; ++r) {
        for (int j = 0; j < k; ++j) a[r][j] = others[idx[j]].p[eq_start + r - 1];
        b[r] = target.p[eq_start + r - 1];
      }
      std::vector<double> w;
      if (!solve_square(a, b, w)) continue;
      bool feasible = true;
      for (double x : w)
        if (x < -tol) feasible = false;
      if (!feasible) continue;
      std::vector<double> combo(dim, 0.0);
      double sum = 0.0;
      for (int j = 0; j < k; ++j) {
        sum += w[j];
        for (int c = 0; c < dim; ++c) combo[c] += w[j] * others[idx[j]].p[c];
      }
      if (std::abs(sum - 1.0) > tol) continue;
      double err = 0.0;
      for (int c = 0; c < dim; ++c) err = std::max(err, std::abs(combo[c] - target.p[c]));
      if (err <= tol) return true;
    }
    return false;
  };

  const int max_k = std::min(n, dim + 1);
  std::vector<int> idx;
  // enumerate subsets of size 1..max_k
  for (int k = 1; k <= max_k; ++k) {
    idx.assign(k, 0);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (try_subset(idx)) return true;
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return false;
}

double imperfect_monitoring_bound(const ReputationScenario& s, int theta_star,
                                  const MixedAction& a1star, double chi0) {
  const double v = commitment_payoff(s, theta_star, a1star);
  std::vector<double> point(s.num_states(), 0.0);
  point[theta_star] = 1.0;
  double worst = kInf;
  for (int a2 = 0; a2 < s.game.num_actions2(); ++a2)
    worst = std::min(worst, expected_payoff(s.game, s.game.u1, point, a1star, a2));
  return v + chi0 * (worst - v);
}

LambdaMembership lambda_region_membership(const ReputationScenario& s,
                                          std::span<const double> lambda, int theta_star,
                                          const MixedAction& a1star) {
  LambdaMembership out;
  out.worst_margin = lambda_box_worst_margin(s, lambda, theta_star, a1star);
  out.in_open = out.worst_margin > kTieTol;
  if (out.in_open)
    out.side = ClosureSide::inside;
  else if (out.worst_margin < -kTieTol)
    out.side = ClosureSide::outside;
  else
    out.side = ClosureSide::boundary;
  return out;
}

}  // namespace repgame
