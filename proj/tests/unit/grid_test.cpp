#include <cmath>

#include "doctest.h"
#include "repgame/construction.hpp"
#include "repgame/error.hpp"
#include "repgame/grid.hpp"
#include "support.hpp"

using namespace repgame;

TEST_CASE("grid region bookkeeping") {
  GridRegion g;
  g.axis_states = {1, 2};
  g.step = 0.5;
  g.points_per_axis = 5;
  g.member.assign(25, 0);
  CHECK(g.size() == 25);
  const std::vector<int> c = {2, 3};
  CHECK(g.coord(g.flat(c)) == c);
  std::size_t snapped;
  CHECK(g.snap({1.01, 1.49}, snapped));
  CHECK(g.coord(snapped) == std::vector<int>{2, 3});
  CHECK(!g.snap({3.0, 0.0}, snapped));
}

TEST_CASE("hausdorff distance in cells") {
  GridRegion a, b;
  a.axis_states = b.axis_states = {0, 1};
  a.step = b.step = 1.0;
  a.points_per_axis = b.points_per_axis = 4;
  a.member.assign(16, 0);
  b.member.assign(16, 0);
  a.member[a.flat({0, 0})] = 1;
  b.member[b.flat({0, 0})] = 1;
  CHECK(hausdorff_cells(a, b) == 0.0);
  b.member[b.flat({2, 3})] = 1;
  CHECK(hausdorff_cells(a, b) == 3.0);
}

TEST_CASE("iteration on the pure-H example converges to the linear region") {
  const ReputationScenario s = motivating_example_scenario_pure();
  LambdaIterationConfig cfg;
  cfg.xi = 0.2;
  cfg.eps = 0.25;
  cfg.grid_step = 0.05;
  cfg.grid_max = 4.0;
  cfg.max_k = 50;
  const LambdaIterationResult res = lambda_k_iteration(s, 0, MixedAction::pure(0, 3), cfg);

  CHECK(res.stabilized);
  CHECK(res.iterations <= 50);
  CHECK(res.hausdorff_to_target <= 2.0);

  // monotone stages
  for (std::size_t k = 1; k < res.stages.size(); ++k)
    for (std::size_t i = 0; i < res.stages[k].size(); ++i)
      if (res.stages[k - 1].member[i]) CHECK(res.stages[k].member[i]);

  // axis points just below the intercept are in the seed set
  const GridRegion& seed = res.stages[0];
  std::size_t idx;
  REQUIRE(seed.snap({0.0, 2.95}, idx));
  CHECK(seed.member[idx]);
  REQUIRE(seed.snap({2.95, 0.0}, idx));
  CHECK(seed.member[idx]);
  // but a central point near the boundary is not
  REQUIRE(seed.snap({1.45, 1.45}, idx));
  CHECK(!seed.member[idx]);

  // every stage stays inside the target region
  const GridRegion& last = res.stages.back();
  for (std::size_t i = 0; i < last.size(); ++i)
    if (last.member[i]) CHECK(res.target.member[i]);
}

TEST_CASE("iteration with a mixed reference action stays monotone") {
  const EquilibriumMachine eq = motivating_example_profile(0.1);
  LambdaIterationConfig cfg;
  cfg.xi = 0.2;
  cfg.eps = 0.3;
  cfg.grid_step = 0.1;
  cfg.grid_max = 3.0;
  cfg.max_k = 12;
  cfg.adversary_samples = 64;
  cfg.seed = 5;
  const LambdaIterationResult res =
      lambda_k_iteration(eq.scenario, 0, eq.scenario.a1_star[0], cfg);
  CHECK(res.adversary_profiles_checked > 0);
  for (std::size_t k = 1; k < res.stages.size(); ++k)
    for (std::size_t i = 0; i < res.stages[k].size(); ++i)
      if (res.stages[k - 1].member[i]) CHECK(res.stages[k].member[i]);
  for (std::size_t i = 0; i < res.stages.back().size(); ++i)
    if (res.stages.back().member[i]) CHECK(res.target.member[i]);
}

TEST_CASE("grid iteration guards") {
  const ReputationScenario s = motivating_example_scenario_pure();
  LambdaIterationConfig cfg;
  cfg.grid_step = 1.0;
  cfg.grid_max = 4.0;  // five points per axis: too coarse
  CHECK_THROWS_AS(lambda_k_iteration(s, 0, MixedAction::pure(0, 3), cfg), ValidationError);
}
