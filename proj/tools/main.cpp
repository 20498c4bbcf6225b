#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "repgame/construction.hpp"
#include "repgame/error.hpp"
#include "repgame/grid.hpp"
#include "repgame/io.hpp"
#include "repgame/report.hpp"
#include "repgame/version.hpp"

using namespace repgame;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
};

json number_or_inf(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

std::string out_path(const Globals& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / name).string();
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

// Writes the artifact with its manifest id embedded, and the wall-clock
// manifest as a sibling file so artifacts stay byte-identical across runs.
void emit(const Globals& g, RunManifest manifest, const std::string& artifact_name,
          json artifact, const Timer& timer) {
  manifest.version = kVersion;
  const std::string path = out_path(g, artifact_name);
  manifest.outputs.push_back(path);
  artifact["manifest_id"] = manifest.id();
  write_file(path, artifact.dump(2) + "\n");
  manifest.wall_clock_ms = timer.ms();
  write_file(path + ".manifest.json", manifest_to_json(manifest) + "\n");
  std::cout << "wrote " << path << "\n";
}

json claim_json(const Claim& c) {
  json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["slack"] = c.slack;
  j["slack_kind"] = c.slack_kind;
  if (c.has_expectation) {
    j["expected"] = c.expected;
    j["pass"] = c.pass;
  }
  return j;
}

int resolve_state(const ReputationScenario& s, const std::string& label) {
  const int st = s.game.state_index(label);
  if (st < 0) throw ValidationError("unknown state: " + label);
  return st;
}

int cmd_validate(const Globals&, const std::string& scenario_path) {
  const ReputationScenario s = load_scenario(scenario_path);
  const ValidationReport rep = validate_scenario(s);
  for (const auto& e : rep.errors) std::cout << "error: " << e << "\n";
  for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
  std::cout << (rep.ok() ? "scenario ok" : "scenario invalid") << " (" << rep.errors.size()
            << " errors, " << rep.warnings.size() << " warnings)\n";
  return rep.ok() ? 0 : 1;
}

struct RegionsArgs {
  std::string scenario_path, theta_star, alpha;
  double grid_step = 0.05, grid_max = 4.0;
  bool grid = false, iterate = false;
  double xi = 0.2, eps = 0.25;
  int max_k = 50;
};

int cmd_regions(const Globals& g, const RegionsArgs& a) {
  Timer timer;
  const ReputationScenario s = load_scenario(a.scenario_path);
  const int theta_star = resolve_state(s, a.theta_star);
  const int a_idx = s.resolve_commitment_action(a.alpha);
  const MixedAction alpha = s.a1_star[a_idx];

  const ClassificationReport cls = classify_scenario(s, theta_star, alpha);
  const RegionSpec spec = region_spec_for(s, theta_star, alpha);
  auto [lv, cond] = prior_likelihood(s, alpha);

  json summary;
  summary["theta_star"] = s.game.states[theta_star];
  summary["reference_action"] = "#" + std::to_string(a_idx);
  json psi = json::array();
  for (double x : spec.psi) psi.push_back(number_or_inf(x));
  summary["psi_star"] = std::move(psi);
  json tb = json::array();
  for (int st : theta_b_set(s, theta_star, alpha)) tb.push_back(s.game.states[st]);
  summary["theta_b"] = std::move(tb);
  summary["lambda"] = lv.lambda;
  summary["phi"] = cond.phi;
  summary["chi0"] = number_or_inf(cls.chi0);
  summary["in_lambda_bar"] = in_lambda_bar(s, lv.lambda, theta_star, alpha);
  summary["in_lambda"] = cls.box_region.in_open;
  summary["lambda_closure_side"] = cls.box_region.side == ClosureSide::inside    ? "inside"
                                   : cls.box_region.side == ClosureSide::outside ? "outside"
                                                                                 : "boundary";
  summary["lambda_worst_vertex_margin"] = cls.box_region.worst_margin;
  summary["in_lambda_underline"] = cls.in_underline;
  summary["underline_boundary_distance"] = number_or_inf(cls.underline_distance);
  summary["commitment_payoff"] = commitment_payoff(s, theta_star, alpha);

  RunManifest manifest;
  manifest.command = "regions";
  manifest.scenario_path = a.scenario_path;
  manifest.scenario_hash = hex64(fnv1a(read_file(a.scenario_path)));
  manifest.params = "theta_star=" + a.theta_star + " alpha=" + a.alpha +
                    " grid_step=" + std::to_string(a.grid_step) +
                    " grid_max=" + std::to_string(a.grid_max);
  manifest.seed = g.seed;

  if (a.grid || a.iterate) {
    // membership flags over the finite-psi axes, the other coordinates at zero
    std::vector<int> axes;
    for (int st = 0; st < s.num_states(); ++st)
      if (!std::isinf(spec.psi[st])) axes.push_back(st);
    if (axes.empty()) throw ValidationError("regions: theta_b is empty, no grid axes");
    const int points = static_cast<int>(std::floor(a.grid_max / a.grid_step)) + 1;
    std::ostringstream csv;
    for (std::size_t d = 0; d < axes.size(); ++d)
      csv << (d ? "," : "") << "lambda_" << s.game.states[axes[d]];
    csv << ",in_lambda_bar,in_lambda,in_lambda_underline\n";
    std::vector<int> coord(axes.size(), 0);
    long rows = 0;
    while (true) {
      std::vector<double> lam(s.num_states(), 0.0);
      for (std::size_t d = 0; d < axes.size(); ++d) lam[axes[d]] = coord[d] * a.grid_step;
      for (std::size_t d = 0; d < axes.size(); ++d)
        csv << (d ? "," : "") << lam[axes[d]];
      csv << "," << (in_lambda_bar(s, lam, theta_star, alpha) ? 1 : 0) << ","
          << (in_lambda(s, lam, theta_star, alpha) ? 1 : 0) << ","
          << (in_lambda_underline(lam, spec) ? 1 : 0) << "\n";
      ++rows;
      int d = static_cast<int>(axes.size()) - 1;
      while (d >= 0 && ++coord[d] == points) coord[d--] = 0;
      if (d < 0) break;
    }
    const std::string grid_path = out_path(g, "regions_grid.csv");
    write_file(grid_path, csv.str());
    manifest.outputs.push_back(grid_path);
    summary["grid_rows"] = rows;
    summary["grid_points_per_axis"] = points;
    std::cout << "wrote " << grid_path << "\n";
  }

  if (a.iterate) {
    LambdaIterationConfig cfg;
    cfg.xi = a.xi;
    cfg.eps = a.eps;
    cfg.grid_step = a.grid_step;
    cfg.grid_max = a.grid_max;
    cfg.max_k = a.max_k;
    cfg.seed = g.seed;
    const LambdaIterationResult res = lambda_k_iteration(s, theta_star, alpha, cfg);
    json it;
    it["iterations"] = res.iterations;
    it["stabilized"] = res.stabilized;
    it["hausdorff_to_target_cells"] = number_or_inf(res.hausdorff_to_target);
    it["adversary_profiles_checked"] = res.adversary_profiles_checked;
    it["final_count"] = res.stages.back().count();
    it["target_count"] = res.target.count();
    it["notes"] = res.notes;
    summary["iteration"] = std::move(it);

    std::ostringstream csv;
    const GridRegion& last = res.stages.back();
    for (std::size_t d = 0; d < last.axis_states.size(); ++d)
      csv << (d ? "," : "") << "lambda_" << s.game.states[last.axis_states[d]];
    csv << ",in_lambda_k,in_lambda_underline\n";
    for (std::size_t i = 0; i < last.size(); ++i) {
      const std::vector<double> x = last.point(i);
      for (std::size_t d = 0; d < x.size(); ++d) csv << (d ? "," : "") << x[d];
      csv << "," << int(last.member[i]) << "," << int(res.target.member[i]) << "\n";
    }
    const std::string it_path = out_path(g, "regions_iteration.csv");
    write_file(it_path, csv.str());
    manifest.outputs.push_back(it_path);
    std::cout << "wrote " << it_path << "\n";
  }

  emit(g, std::move(manifest), "regions_summary.json", std::move(summary), timer);
  return 0;
}

struct SimulateArgs {
  std::string scenario_path, profile_path, true_type = "prior", alpha, theta_star;
  double delta = 0.95;
  int horizon = 1000, reps = 100;
  double band_eps = -1.0;
  double expect_payoff = std::numeric_limits<double>::quiet_NaN();
  double expect_tol = 1e-9;
  std::string out = "traces.csv";
  bool no_periods = false;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a) {
  Timer timer;
  const ReputationScenario s = load_scenario(a.scenario_path);
  const Profile p = load_profile(a.profile_path, s);

  SimConfig cfg;
  cfg.delta = a.delta;
  cfg.horizon = a.horizon;
  cfg.replications = a.reps;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.true_type = parse_true_type(s, a.true_type);
  cfg.record_periods = !a.no_periods;
  if (!a.alpha.empty()) {
    cfg.reference_action = s.resolve_commitment_action(a.alpha);
    if (!a.theta_star.empty()) {
      const int ts = resolve_state(s, a.theta_star);
      cfg.region = region_spec_for(s, ts, s.a1_star[cfg.reference_action]);
      auto [lv, cond] = prior_likelihood(s, s.a1_star[cfg.reference_action]);
      const double chi0 = chi_statistic(lv.lambda, *cfg.region);
      if (a.band_eps > 0.0) {
        cfg.has_band = true;
        cfg.band_lo = chi0;
        cfg.band_hi = chi0 + a.band_eps;
      }
    }
  }

  auto [traces, summary] = simulate(s, p, cfg);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.scenario_path = a.scenario_path;
  manifest.scenario_hash = hex64(fnv1a(read_file(a.scenario_path)));
  manifest.params = "profile=" + a.profile_path + " delta=" + std::to_string(a.delta) +
                    " horizon=" + std::to_string(a.horizon) +
                    " reps=" + std::to_string(a.reps) + " true_type=" + a.true_type;
  manifest.seed = g.seed;

  if (cfg.record_periods) {
    std::ostringstream csv;
    csv << "rep,t,a1,a2,u1,chi,kl\n";
    for (const auto& tr : traces)
      for (const auto& row : tr.periods) {
        csv << tr.rep << "," << row.t << "," << s.game.actions1[row.a1] << ","
            << s.game.actions2[row.a2] << "," << row.u1 << ",";
        if (!std::isnan(row.chi)) csv << row.chi;
        csv << ",";
        if (!std::isnan(row.kl)) csv << row.kl;
        csv << "\n";
      }
    const std::string csv_path = out_path(g, a.out);
    write_file(csv_path, csv.str());
    manifest.outputs.push_back(csv_path);
    std::cout << "wrote " << csv_path << "\n";
  }

  json j;
  j["reps"] = summary.reps;
  j["mean_payoff"] = summary.mean_payoff;
  j["payoff_stddev"] = summary.payoff_stddev;
  j["mean_freq"] = summary.mean_freq;
  j["mean_kl_sum"] = summary.mean_kl_sum;
  j["p_no_upcrossing"] = summary.p_no_upcrossing;
  j["pinsker_violations"] = summary.pinsker_violations;
  j["off_path_traces"] = summary.off_path_traces;
  j["truncation_remainder"] = summary.truncation_remainder;
  std::vector<Claim> claims;
  {
    Claim c;
    c.name = "discounted_payoff";
    c.value = summary.mean_payoff;
    c.slack = summary.truncation_remainder;
    c.slack_kind = "truncation";
    if (!std::isnan(a.expect_payoff)) {
      c.has_expectation = true;
      c.expected = a.expect_payoff;
      c.pass = std::abs(summary.mean_payoff - a.expect_payoff) <= a.expect_tol;
    }
    claims.push_back(c);
    Claim pk;
    pk.name = "pinsker_violations";
    pk.value = static_cast<double>(summary.pinsker_violations);
    pk.slack = 0.0;
    pk.slack_kind = "exact";
    pk.has_expectation = true;
    pk.expected = 0.0;
    pk.pass = summary.pinsker_violations == 0;
    claims.push_back(pk);
  }
  json jc = json::array();
  for (const auto& c : claims) jc.push_back(claim_json(c));
  j["claims"] = std::move(jc);

  const std::string summary_name =
      std::filesystem::path(a.out).stem().string() + ".summary.json";
  emit(g, std::move(manifest), summary_name, std::move(j), timer);
  for (const auto& c : claims)
    if (c.has_expectation && !c.pass) return 1;
  return 0;
}

struct DeviationArgs {
  std::string scenario_path, profile_path, alpha, theta_star;
  double epsilon = 0.1;
  double chi = std::numeric_limits<double>::quiet_NaN();
  int horizon = 400;
  std::string out = "plan.json";
  bool verify = false;
  int verify_reps = 10000, verify_horizon = 2000;
  double freq_eps = 0.1;
};

int cmd_deviation(const Globals& g, const DeviationArgs& a) {
  Timer timer;
  const ReputationScenario s = load_scenario(a.scenario_path);
  const Profile p = load_profile(a.profile_path, s);
  const int a_idx = s.resolve_commitment_action(a.alpha);
  const MixedAction alpha = s.a1_star[a_idx];
  const int theta_star = resolve_state(s, a.theta_star);

  RegionSpec spec = region_spec_for(s, theta_star, alpha);
  auto [lv, cond] = prior_likelihood(s, alpha);
  spec.chi = std::isnan(a.chi) ? chi_statistic(lv.lambda, spec) : a.chi;

  const DeviationPlan plan = construct_deviation(s, p, alpha, spec, a.epsilon, a.horizon);
  const std::string plan_path = out_path(g, a.out);
  write_file(plan_path, plan_to_json(plan, s) + "\n");
  std::cout << "wrote " << plan_path << "\n";

  RunManifest manifest;
  manifest.command = "deviation";
  manifest.scenario_path = a.scenario_path;
  manifest.scenario_hash = hex64(fnv1a(read_file(a.scenario_path)));
  manifest.params = "alpha=" + a.alpha + " epsilon=" + std::to_string(a.epsilon) +
                    " chi=" + std::to_string(spec.chi) +
                    " horizon=" + std::to_string(a.horizon);
  manifest.seed = g.seed;
  manifest.outputs.push_back(plan_path);

  json j;
  j["chi"] = spec.chi;
  j["epsilon"] = a.epsilon;
  j["plan_horizon"] = a.horizon;
  j["root_survival"] = plan.root_survival;
  j["doob_floor"] = doob_floor(spec.chi, a.epsilon);
  j["dead_ends"] = plan.dead_ends;
  std::vector<Claim> claims;
  {
    Claim c;
    c.name = "root_survival_vs_doob_floor";
    c.value = plan.root_survival;
    c.slack = 0.0;
    c.slack_kind = "truncation-overestimates";
    c.has_expectation = true;
    c.expected = doob_floor(spec.chi, a.epsilon);
    c.pass = plan.root_survival >= c.expected - 1e-12;
    claims.push_back(c);
  }

  if (a.verify) {
    DeviationVerifyConfig vcfg;
    vcfg.replications = a.verify_reps;
    vcfg.horizon = a.verify_horizon;
    vcfg.seed = g.seed;
    vcfg.delta = s.delta;
    vcfg.freq_eps = a.freq_eps;
    vcfg.threads = g.threads;
    const DeviationVerifyReport rep = verify_deviation(s, p, plan, alpha, vcfg);
    json jv;
    jv["band_violations"] = rep.band_violations;
    jv["freq_close_prob"] = rep.freq_close_prob;
    jv["beta_empirical"] = rep.beta_empirical;
    jv["mean_pred_far_periods"] = rep.mean_pred_far;
    jv["t_budget"] = rep.t_budget;
    jv["fallback_periods"] = rep.fallback_periods;
    j["verify"] = std::move(jv);
    Claim c9;
    c9.name = "band_violations";
    c9.value = static_cast<double>(rep.band_violations);
    c9.slack = 0.0;
    c9.slack_kind = "exact";
    c9.has_expectation = true;
    c9.expected = 0.0;
    c9.pass = rep.band_violations == 0;
    claims.push_back(c9);
    Claim ct;
    ct.name = "mean_pred_far_vs_budget";
    ct.value = rep.mean_pred_far;
    ct.slack = 0.0;
    ct.slack_kind = "markov-bound";
    ct.has_expectation = true;
    ct.expected = static_cast<double>(rep.t_budget);
    ct.pass = rep.mean_pred_far <= static_cast<double>(rep.t_budget);
    claims.push_back(ct);
  }
  json jc = json::array();
  for (const auto& c : claims) jc.push_back(claim_json(c));
  j["claims"] = std::move(jc);
  emit(g, std::move(manifest), "deviation_report.json", std::move(j), timer);
  for (const auto& c : claims)
    if (c.has_expectation && !c.pass) return 1;
  return 0;
}

int cmd_classify(const Globals& g, const std::string& scenario_path,
                 const std::string& theta_star, const std::string& alpha_spec) {
  Timer timer;
  const ReputationScenario s = load_scenario(scenario_path);
  const int ts = resolve_state(s, theta_star);
  const int a_idx = s.resolve_commitment_action(alpha_spec);
  const ClassificationReport rep = classify_scenario(s, ts, s.a1_star[a_idx]);
  json j;
  j["pure"] = rep.pure;
  j["lambda"] = rep.lambda;
  j["in_lambda"] = rep.box_region.in_open;
  j["lambda_closure_side"] = rep.box_region.side == ClosureSide::inside    ? "inside"
                             : rep.box_region.side == ClosureSide::outside ? "outside"
                                                                           : "boundary";
  j["lambda_worst_vertex_margin"] = rep.box_region.worst_margin;
  j["chi0"] = number_or_inf(rep.chi0);
  j["in_lambda_underline"] = rep.in_underline;
  j["underline_boundary_distance"] = number_or_inf(rep.underline_distance);
  j["br_phi_singleton"] = rep.br_phi_singleton;
  j["in_hull_of_others"] = rep.in_hull_of_others;
  j["implied_statement"] = rep.implied_statement;
  j["claims"] = json::array();

  RunManifest manifest;
  manifest.command = "classify";
  manifest.scenario_path = scenario_path;
  manifest.scenario_hash = hex64(fnv1a(read_file(scenario_path)));
  manifest.params = "theta_star=" + theta_star + " alpha=" + alpha_spec;
  manifest.seed = g.seed;
  std::cout << "implied: " << rep.implied_statement << "\n";
  emit(g, std::move(manifest), "classification.json", std::move(j), timer);
  return 0;
}

struct EqBuildArgs {
  std::string scenario_path, theta_star, a1_star;
  std::string out = "eq.json";
};

int cmd_eq_build(const Globals& g, const EqBuildArgs& a) {
  Timer timer;
  const ReputationScenario s = load_scenario(a.scenario_path);
  const int ts = resolve_state(s, a.theta_star);
  const int a1 = s.game.action1_index(a.a1_star);
  if (a1 < 0) throw ValidationError("unknown action: " + a.a1_star);
  const EquilibriumMachine eq = build_low_payoff_equilibrium(s, ts, a1);
  const std::string path = out_path(g, a.out);
  write_file(path, equilibrium_to_json(eq) + "\n");
  std::cout << "wrote " << path << "\n";
  std::cout << "k_bar=" << eq.params.k_bar << " k_star=" << eq.params.k_star
            << " t1=" << eq.params.t1 << " eta=" << eq.params.eta
            << " kappa=" << eq.params.kappa << " eps=" << eq.params.eps << "\n";

  RunManifest manifest;
  manifest.command = "equilibrium build";
  manifest.scenario_path = a.scenario_path;
  manifest.scenario_hash = hex64(fnv1a(read_file(a.scenario_path)));
  manifest.params = "theta_star=" + a.theta_star + " a1_star=" + a.a1_star;
  manifest.seed = g.seed;
  manifest.outputs.push_back(path);
  manifest.version = kVersion;
  manifest.wall_clock_ms = timer.ms();
  write_file(path + ".manifest.json", manifest_to_json(manifest) + "\n");
  return 0;
}

struct EqCheckArgs {
  std::string eq_path;
  double delta = 0.95, tol = 1e-6;
  int horizon = 200;
};

int cmd_eq_check(const Globals& g, const EqCheckArgs& a) {
  Timer timer;
  const EquilibriumMachine eq = load_equilibrium(a.eq_path);
  IncentiveConfig cfg;
  cfg.delta = a.delta;
  cfg.horizon = a.horizon;
  cfg.tol = a.tol;
  cfg.theta_star = 0;
  const IncentiveReport rep = check_incentives(eq.scenario, eq.profile, cfg);
  json j;
  j["max_p2_gap"] = rep.max_p2_gap;
  j["p2_where"] = rep.p2_where;
  j["p2_first_violation"] = rep.p2_first_violation;
  j["max_oneshot_gain"] = rep.max_oneshot_gain;
  j["oneshot_where"] = rep.oneshot_where;
  j["states_checked"] = rep.states_checked;
  j["truncation_bound"] = rep.truncation_bound;
  j["tol"] = a.tol;
  std::vector<Claim> claims;
  Claim c;
  c.name = "incentive_max_oneshot_gain";
  c.value = rep.max_oneshot_gain;
  c.slack = rep.truncation_bound;
  c.slack_kind = "truncation";
  c.has_expectation = true;
  c.expected = 0.0;
  c.pass = rep.max_oneshot_gain <= a.tol;
  claims.push_back(c);
  Claim c2;
  c2.name = "incentive_p2_myopic_gap";
  c2.value = rep.max_p2_gap;
  c2.slack = a.tol;
  c2.slack_kind = "tolerance";
  c2.has_expectation = true;
  c2.expected = 0.0;
  c2.pass = rep.max_p2_gap <= a.tol;
  claims.push_back(c2);
  json jc = json::array();
  for (const auto& cl : claims) jc.push_back(claim_json(cl));
  j["claims"] = std::move(jc);

  RunManifest manifest;
  manifest.command = "equilibrium check";
  manifest.scenario_path = a.eq_path;
  manifest.scenario_hash = hex64(fnv1a(read_file(a.eq_path)));
  manifest.params = "delta=" + std::to_string(a.delta) + " tol=" + std::to_string(a.tol) +
                    " horizon=" + std::to_string(a.horizon);
  manifest.seed = g.seed;
  const bool ok = rep.pass(a.tol);
  std::cout << (ok ? "incentives ok" : "incentive violation") << ": max one-shot gain "
            << rep.max_oneshot_gain << ", max player-2 gap " << rep.max_p2_gap << "\n";
  emit(g, std::move(manifest), "incentive_report.json", std::move(j), timer);
  return ok ? 0 : 1;
}

struct EqExampleArgs {
  double eps_mix = 0.1;
  std::string out = "eq.json";
  std::string scenario_out, profile_out;
};

int cmd_eq_example(const Globals& g, const EqExampleArgs& a) {
  const EquilibriumMachine eq = motivating_example_profile(a.eps_mix);
  const std::string path = out_path(g, a.out);
  write_file(path, equilibrium_to_json(eq) + "\n");
  std::cout << "wrote " << path << "\n";
  if (!a.scenario_out.empty()) {
    write_file(out_path(g, a.scenario_out), scenario_to_json(eq.scenario) + "\n");
    std::cout << "wrote " << out_path(g, a.scenario_out) << "\n";
  }
  if (!a.profile_out.empty()) {
    write_file(out_path(g, a.profile_out), profile_to_json(eq.profile, eq.scenario) + "\n");
    std::cout << "wrote " << out_path(g, a.profile_out) << "\n";
  }
  return 0;
}

int cmd_report(const Globals& g, const std::vector<std::string>& inputs,
               const std::string& out) {
  Timer timer;
  json merged;
  merged["inputs"] = json::array();
  merged["claims"] = json::array();
  std::string hash;
  bool all_pass = true;
  for (const auto& path : inputs) {
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw ParseError(path + ": " + e.what());
    }
    std::string file_hash;
    const std::string manifest_path = path + ".manifest.json";
    if (std::filesystem::exists(manifest_path)) {
      const json m = json::parse(read_file(manifest_path));
      file_hash = m.value("scenario_hash", "");
    }
    if (!file_hash.empty()) {
      if (hash.empty())
        hash = file_hash;
      else if (hash != file_hash)
        throw Error("report: scenario hash mismatch between inputs (" + path + ")");
    }
    merged["inputs"].push_back(path);
    if (j.contains("claims"))
      for (const auto& c : j["claims"]) {
        merged["claims"].push_back(c);
        if (c.contains("pass") && !c["pass"].get<bool>()) all_pass = false;
      }
  }
  merged["scenario_hash"] = hash;
  merged["all_pass"] = all_pass;

  RunManifest manifest;
  manifest.command = "report";
  manifest.scenario_hash = hash;
  manifest.seed = g.seed;
  emit(g, std::move(manifest), out, std::move(merged), timer);
  std::cout << (all_pass ? "all claims pass" : "some claims fail") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reputation-game analysis toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--threads", g.threads, "worker threads");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.set_version_flag("--version", kVersion);

  std::string scenario_path, theta_star, alpha;

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--scenario", scenario_path, "scenario JSON")->required();

  RegionsArgs ra;
  auto* regions = app.add_subcommand("regions", "likelihood-ratio regions and intercepts");
  regions->add_option("--scenario", ra.scenario_path, "scenario JSON")->required();
  regions->add_option("--theta-star", ra.theta_star, "reference state")->required();
  regions->add_option("--alpha", ra.alpha, "commitment action")->required();
  regions->add_option("--grid-step", ra.grid_step, "grid resolution");
  regions->add_option("--grid-max", ra.grid_max, "grid bound per axis");
  regions->add_flag("--grid", ra.grid, "emit membership grid CSV");
  regions->add_flag("--iterate", ra.iterate, "run the reachable-set iteration");
  regions->add_option("--xi", ra.xi, "seed-set size parameter");
  regions->add_option("--eps", ra.eps, "belief-jump threshold");
  regions->add_option("--max-k", ra.max_k, "iteration cap");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo traces of a profile");
  sim->add_option("--scenario", sa.scenario_path, "scenario JSON")->required();
  sim->add_option("--profile", sa.profile_path, "profile JSON")->required();
  sim->add_option("--delta", sa.delta, "discount factor");
  sim->add_option("--horizon", sa.horizon, "periods per trace");
  sim->add_option("--reps", sa.reps, "replications");
  sim->add_option("--true-type", sa.true_type,
                  "prior | strategic:<state> | commitment:<action>");
  sim->add_option("--alpha", sa.alpha, "reference commitment action for lambda/KL");
  sim->add_option("--theta-star", sa.theta_star, "state for the region spec");
  sim->add_option("--band-eps", sa.band_eps, "upcrossing band width above chi0");
  sim->add_option("--expect-payoff", sa.expect_payoff, "assert the mean payoff");
  sim->add_option("--expect-tol", sa.expect_tol, "payoff assertion tolerance");
  sim->add_option("--out", sa.out, "trace CSV name");
  sim->add_flag("--no-periods", sa.no_periods, "skip per-period CSV rows");

  DeviationArgs da;
  auto* dev = app.add_subcommand("deviation", "conditioned deviation plan");
  dev->add_option("--scenario", da.scenario_path, "scenario JSON")->required();
  dev->add_option("--profile", da.profile_path, "profile JSON")->required();
  dev->add_option("--alpha", da.alpha, "commitment action")->required();
  dev->add_option("--theta-star", da.theta_star, "reference state")->required();
  dev->add_option("--epsilon", da.epsilon, "band width");
  dev->add_option("--chi", da.chi, "band level (default: chi at the prior)");
  dev->add_option("--horizon", da.horizon, "plan horizon");
  dev->add_option("--out", da.out, "plan JSON name");
  dev->add_flag("--verify", da.verify, "simulate and verify the plan");
  dev->add_option("--reps", da.verify_reps, "verification replications");
  dev->add_option("--sim-horizon", da.verify_horizon, "verification horizon");
  dev->add_option("--freq-eps", da.freq_eps, "frequency closeness target");

  auto* classify = app.add_subcommand("classify", "theorem-side classification");
  classify->add_option("--scenario", scenario_path, "scenario JSON")->required();
  classify->add_option("--theta-star", theta_star, "reference state")->required();
  classify->add_option("--alpha", alpha, "commitment action")->required();

  auto* eq = app.add_subcommand("equilibrium", "constructions and incentive checks");
  eq->require_subcommand(1);
  EqBuildArgs ba;
  auto* build = eq->add_subcommand("build", "low-payoff construction");
  build->add_option("--scenario", ba.scenario_path, "scenario JSON")->required();
  build->add_option("--theta-star", ba.theta_star, "reference state")->required();
  build->add_option("--a1-star", ba.a1_star, "pure commitment action label")->required();
  build->add_option("--out", ba.out, "equilibrium JSON name");
  EqCheckArgs ca;
  auto* check = eq->add_subcommand("check", "numerical incentive audit");
  check->add_option("--eq", ca.eq_path, "equilibrium JSON")->required();
  check->add_option("--delta", ca.delta, "discount factor");
  check->add_option("--tol", ca.tol, "tolerance");
  check->add_option("--horizon", ca.horizon, "value truncation horizon");
  EqExampleArgs ea;
  auto* example = eq->add_subcommand("example", "the three-state example profile");
  example->add_option("--eps-mix", ea.eps_mix, "mixing weight of the perturbed action");
  example->add_option("--out", ea.out, "equilibrium JSON name");
  example->add_option("--scenario-out", ea.scenario_out, "also write the scenario");
  example->add_option("--profile-out", ea.profile_out, "also write the profile");

  std::vector<std::string> report_inputs;
  std::string report_out = "report.json";
  auto* report = app.add_subcommand("report", "merge analysis outputs");
  report->add_option("inputs", report_inputs, "analysis JSON files");
  report->add_option("--out", report_out, "consolidated JSON name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate(g, scenario_path);
    if (app.got_subcommand(regions)) return cmd_regions(g, ra);
    if (app.got_subcommand(sim)) return cmd_simulate(g, sa);
    if (app.got_subcommand(dev)) return cmd_deviation(g, da);
    if (app.got_subcommand(classify)) return cmd_classify(g, scenario_path, theta_star, alpha);
    if (app.got_subcommand(eq)) {
      if (eq->got_subcommand(build)) return cmd_eq_build(g, ba);
      if (eq->got_subcommand(check)) return cmd_eq_check(g, ca);
      if (eq->got_subcommand(example)) return cmd_eq_example(g, ea);
    }
    if (app.got_subcommand(report)) {
      if (report_inputs.empty()) {
        std::cerr << "usage error: report needs at least one input file\n";
        return 2;
      }
      return cmd_report(g, report_inputs, report_out);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
