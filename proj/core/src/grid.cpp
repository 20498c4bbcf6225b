#include "repgame/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "repgame/error.hpp"
#include "repgame/rng.hpp"

namespace repgame {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

long GridRegion::count() const {
  long c = 0;
  for (auto b : member) c += b;
  return c;
}

std::size_t GridRegion::flat(const std::vector<int>& coord) const {
  std::size_t f = 0;
  for (int d = 0; d < dim(); ++d) f = f * points_per_axis + coord[d];
  return f;
}

std::vector<int> GridRegion::coord(std::size_t flat_index) const {
  std::vector<int> c(dim());
  for (int d = dim() - 1; d >= 0; --d) {
    c[d] = static_cast<int>(flat_index % points_per_axis);
    flat_index /= points_per_axis;
  }
  return c;
}

std::vector<double> GridRegion::point(std::size_t flat_index) const {
  std::vector<int> c = coord(flat_index);
  std::vector<double> x(dim());
  for (int d = 0; d < dim(); ++d) x[d] = c[d] * step;
  return x;
}

bool GridRegion::snap(const std::vector<double>& x, std::size_t& out) const {
  std::vector<int> c(dim());
  for (int d = 0; d < dim(); ++d) {
    const long idx = std::lround(x[d] / step);
    if (idx < 0 || idx >= points_per_axis) return false;
    c[d] = static_cast<int>(idx);
  }
  out = flat(c);
  return true;
}

double hausdorff_cells(const GridRegion& a, const GridRegion& b) {
  auto collect = [](const GridRegion& g) {
    std::vector<std::vector<int>> pts;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g.member[i]) pts.push_back(g.coord(i));
    return pts;
  };
  const auto pa = collect(a);
  const auto pb = collect(b);
  if (pa.empty() && pb.empty()) return 0.0;
  if (pa.empty() || pb.empty()) return kInf;
  auto directed = [](const std::vector<std::vector<int>>& from,
                     const std::vector<std::vector<int>>& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = kInf;
      for (const auto& q : to) {
        double d = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k)
          d = std::max(d, static_cast<double>(std::abs(p[k] - q[k])));
        best = std::min(best, d);
        if (best == 0.0) break;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa));
}

namespace {

struct GridContext {
  std::vector<int> axes;        // states with finite psi
  std::vector<double> psi;      // per axis
  double step;
  int points;
  double chi_level;

  double chi_of(const std::vector<double>& x) const {
    double c = 0.0;
    for (int d = 0; d < static_cast<int>(axes.size()); ++d) c += x[d] / psi[d];
    return c;
  }
};

// lambda below the hyperplane sum x_d / tilde_psi_d < 1?
bool below(const std::vector<double>& x, const std::vector<double>& tilde_psi) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) s += x[d] / tilde_psi[d];
  return s < 1.0;
}

// the sub-hyperplane condition for size-xi: every pair of axes i != j must
// satisfy xi/psi_i + xi/psi_j >= 1, so no point below the plane has two
// coordinates above xi
bool corner_condition(const std::vector<double>& tilde_psi, double xi) {
  const int d = static_cast<int>(tilde_psi.size());
  if (d <= 1) return true;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (xi / tilde_psi[i] + xi / tilde_psi[j] < 1.0) return false;
  return true;
}

// 64 candidate intercept vectors below psi, log-spaced per axis
std::vector<std::vector<double>> size_xi_candidates(const GridContext& ctx) {
  const int dim = static_cast<int>(ctx.axes.size());
  const int per_axis = std::max(2, static_cast<int>(std::floor(std::pow(64.0, 1.0 / dim))));
  std::vector<double> fractions(per_axis);
  const double lo = 0.02, hi = 0.999;
  for (int i = 0; i < per_axis; ++i)
    fractions[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (per_axis - 1));
  std::vector<std::vector<double>> out;
  std::vector<int> idx(dim, 0);
  while (true) {
    std::vector<double> cand(dim);
    for (int d = 0; d < dim; ++d) cand[d] = ctx.psi[d] * fractions[idx[d]];
    out.push_back(std::move(cand));
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == per_axis) idx[d--] = 0;
    if (d < 0) break;
    if (static_cast<int>(out.size()) >= 64) break;
  }
  return out;
}

GridRegion make_region(const GridContext& ctx, const ReputationScenario& s) {
  GridRegion g;
  g.axis_states = ctx.axes;
  g.step = ctx.step;
  g.points_per_axis = ctx.points;
  std::size_t total = 1;
  for (int d = 0; d < static_cast<int>(ctx.axes.size()); ++d) total *= ctx.points;
  g.member.assign(total, 0);
  (void)s;
  return g;
}

}  // namespace

LambdaIterationResult lambda_k_iteration(const ReputationScenario& s, int theta_star,
                                         const MixedAction& a1star,
                                         const LambdaIterationConfig& cfg) {
  if (s.num_states() > 3)
    throw BudgetError("lambda_k_iteration: grid iteration supports m <= 3");
  if (cfg.xi <= 0.0 || cfg.eps <= 0.0)
    throw ValidationError("lambda_k_iteration: xi and eps must be positive");

  const RegionSpec spec = region_spec_for(s, theta_star, a1star);
  GridContext ctx;
  for (int st = 0; st < s.num_states(); ++st)
    if (!std::isinf(spec.psi[st])) {
      ctx.axes.push_back(st);
      ctx.psi.push_back(spec.psi[st]);
    }
  if (ctx.axes.empty())
    throw ValidationError("lambda_k_iteration: theta_b is empty, nothing to iterate");
  ctx.step = cfg.grid_step;
  ctx.points = static_cast<int>(std::floor(cfg.grid_max / cfg.grid_step)) + 1;
  ctx.chi_level = spec.chi;
  if (ctx.points < 10)
    throw ValidationError("lambda_k_iteration: grid too coarse (needs >= 10 points per axis)");

  LambdaIterationResult res;
  res.spec = spec;

  // target set on the grid
  GridRegion target = make_region(ctx, s);
  for (std::size_t i = 0; i < target.size(); ++i)
    target.member[i] = ctx.chi_of(target.point(i)) < ctx.chi_level ? 1 : 0;
  res.target = target;

  const int dim = static_cast<int>(ctx.axes.size());

  // seed: size-xi points
  GridRegion acc = make_region(ctx, s);
  {
    const auto candidates = size_xi_candidates(ctx);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      const std::vector<double> x = acc.point(i);
      for (const auto& cand : candidates) {
        if (!corner_condition(cand, cfg.xi)) continue;
        if (below(x, cand)) {
          acc.member[i] = 1;
          break;
        }
      }
    }
  }
  res.stages.push_back(acc);

  // hyperplane family for the hull step: proportional fractions below psi plus
  // the log-spaced candidates used for the seed
  std::vector<std::vector<double>> hull_planes;
  for (int j = 1; j <= 127; ++j) {
    const double f = static_cast<double>(j) / 128.0;
    std::vector<double> plane(dim);
    for (int d = 0; d < dim; ++d) plane[d] = ctx.psi[d] * f * ctx.chi_level;
    hull_planes.push_back(std::move(plane));
  }
  {
    std::vector<double> plane(dim);
    for (int d = 0; d < dim; ++d) plane[d] = ctx.psi[d] * 0.999 * ctx.chi_level;
    hull_planes.push_back(std::move(plane));
  }
  for (auto cand : size_xi_candidates(ctx)) hull_planes.push_back(cand);

  const bool pure = a1star.is_pure();
  const std::vector<int> supp = a1star.support();
  Rng rng(cfg.seed);
  long profiles_checked = 0;

  // non-member list for the pure-case box test
  auto nonmembers_of = [&](const GridRegion& g) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!g.member[i]) out.push_back(g.point(i));
    return out;
  };

  for (int k = 1; k <= cfg.max_k; ++k) {
    GridRegion hat = acc;  // Lambda-hat^k accumulates the previous stage
    const auto nonmem = nonmembers_of(acc);

    for (std::size_t i = 0; i < hat.size(); ++i) {
      if (hat.member[i] || !target.member[i]) continue;
      const std::vector<double> x = hat.point(i);

      bool in_hat;
      if (pure) {
        // the only supported action lands anywhere in the box [0, x]; the
        // adversary needs a jump of L2 size >= eps, so the point is in the
        // one-step set iff every non-member of the box is within eps of x
        in_hat = true;
        for (const auto& q : nonmem) {
          bool inside_box = true;
          double dist2 = 0.0;
          for (int d = 0; d < dim; ++d) {
            if (q[d] > x[d] + 1e-12) {
              inside_box = false;
              break;
            }
            dist2 += (x[d] - q[d]) * (x[d] - q[d]);
          }
          if (inside_box && dist2 >= cfg.eps * cfg.eps) {
            in_hat = false;
            break;
          }
        }
      } else {
        // adversarial sampling over per-type action profiles with a jump of
        // size >= eps for some supported action
        in_hat = true;
        const int n1 = s.game.num_actions1();
        auto respondent_wins = [&](const std::vector<MixedAction>& prof) {
          // jump vectors per supported action
          double max_jump = 0.0;
          for (int a1 : supp) {
            double norm2 = 0.0;
            for (int d = 0; d < dim; ++d) {
              const double jump = x[d] * (1.0 - prof[d].p[a1] / a1star.p[a1]);
              norm2 += jump * jump;
            }
            max_jump = std::max(max_jump, norm2);
          }
          if (max_jump < cfg.eps * cfg.eps) return true;  // quantifier does not bind
          for (int a1 : supp) {
            std::vector<double> landing(dim);
            for (int d = 0; d < dim; ++d) landing[d] = x[d] * prof[d].p[a1] / a1star.p[a1];
            std::size_t snapped;
            if (acc.snap(landing, snapped) && acc.member[snapped]) return true;
          }
          return false;
        };

        std::vector<MixedAction> prof(dim);
        // coordinate-extreme profiles: every type plays a pure action
        std::vector<int> choice(dim, 0);
        while (in_hat) {
          for (int d = 0; d < dim; ++d) prof[d] = MixedAction::pure(choice[d], n1);
          ++profiles_checked;
          if (!respondent_wins(prof)) in_hat = false;
          int d = dim - 1;
          while (d >= 0 && ++choice[d] == n1) choice[d--] = 0;
          if (d < 0) break;
        }
        for (int trial = 0; in_hat && trial < cfg.adversary_samples; ++trial) {
          for (int d = 0; d < dim; ++d) {
            std::vector<double> w(n1);
            double tot = 0.0;
            for (int a = 0; a < n1; ++a) {
              w[a] = -std::log(1.0 - rng.uniform());
              tot += w[a];
            }
            for (int a = 0; a < n1; ++a) w[a] /= tot;
            prof[d] = MixedAction(std::move(w));
          }
          ++profiles_checked;
          if (!respondent_wins(prof)) in_hat = false;
        }
      }
      if (in_hat) hat.member[i] = 1;
    }

    // hull step: grow by every candidate hyperplane whose grid sublevel set
    // sits inside acc union hat
    GridRegion next = acc;
    bool changed = false;
    for (const auto& plane : hull_planes) {
      bool plane_ok = true;  // intercepts must stay strictly below psi * chi
      for (int d = 0; d < dim; ++d)
        if (plane[d] >= ctx.psi[d] * ctx.chi_level) plane_ok = false;
      if (!plane_ok) continue;
      bool contained = true;
      for (std::size_t i = 0; i < next.size() && contained; ++i)
        if (below(next.point(i), plane) && !(acc.member[i] || hat.member[i]))
          contained = false;
      if (!contained) continue;
      for (std::size_t i = 0; i < next.size(); ++i)
        if (!next.member[i] && below(next.point(i), plane)) {
          next.member[i] = 1;
          changed = true;
        }
    }

    res.stages.push_back(next);
    res.iterations = k;
    if (!changed) {
      res.stabilized = true;
      acc = next;
      break;
    }
    acc = next;
  }

  res.adversary_profiles_checked = profiles_checked;
  res.hausdorff_to_target = hausdorff_cells(acc, target);
  res.notes = pure ? "pure reference action: one-step set computed exactly from box geometry"
                   : "mixed reference action: profile quantifier approximated by sampling";
  return res;
}

}  // namespace repgame
