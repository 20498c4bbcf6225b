#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repgame/regions.hpp"

namespace repgame {

// Membership bitset over a regular grid on [0, max]^dim. Axes are the states
// with finite psi (the others stay pinned at zero likelihood ratio).
struct GridRegion {
  std::vector<int> axis_states;
  double step = 0.0;
  int points_per_axis = 0;
  std::vector<std::uint8_t> member;

  int dim() const { return static_cast<int>(axis_states.size()); }
  std::size_t size() const { return member.size(); }
  long count() const;

  std::size_t flat(const std::vector<int>& coord) const;
  std::vector<int> coord(std::size_t flat_index) const;
  std::vector<double> point(std::size_t flat_index) const;
  // nearest grid point; false when outside the bounding box
  bool snap(const std::vector<double>& x, std::size_t& out) const;
};

// max over one set of the min L-inf distance to the other, symmetrized,
// in units of grid cells; +infinity when exactly one side is empty
double hausdorff_cells(const GridRegion& a, const GridRegion& b);

struct LambdaIterationConfig {
  double xi = 0.2;       // size parameter of the seed set
  double eps = 0.25;     // belief-jump threshold
  double grid_step = 0.05;
  double grid_max = 4.0;
  int max_k = 50;
  int adversary_samples = 512;  // random type-action profiles per grid point (mixed case)
  std::uint64_t seed = 1;
};

struct LambdaIterationResult {
  std::vector<GridRegion> stages;  // accumulated Lambda^0..Lambda^K
  GridRegion target;               // Lambda-underline on the same grid
  RegionSpec spec;
  int iterations = 0;
  bool stabilized = false;
  double hausdorff_to_target = 0.0;  // in cells
  long adversary_profiles_checked = 0;
  std::string notes;
};

// Iterates the reachability operator on the grid until the membership set
// stabilizes. With a pure reference action the one-step set is computed
// exactly from box geometry; with a mixed action the action-profile
// quantifier is approximated by adversarial sampling.
LambdaIterationResult lambda_k_iteration(const ReputationScenario& s, int theta_star,
                                         const MixedAction& a1star,
                                         const LambdaIterationConfig& cfg);

}  // namespace repgame
