#pragma once

// Brute-force reference solver for N <= 4. The last coordinate is
// eliminated through the demand equation, so every evaluated point satisfies
// it exactly; the remaining N-1 coordinates are scanned on a regular grid
// that is refined around the incumbent.

#include <cstddef>
#include <optional>
#include <vector>

#include "feedmix/model.hpp"

namespace feedmix {

inline constexpr std::size_t kMaxOracleSize = 4;

struct GridSpec {
  /// Defaults by N: 2001 (N=2), 121 (N=3), 41 (N=4).
  std::optional<std::size_t> points_per_axis;
  std::size_t refine_rounds = 3;  ///< each round shrinks the window 10x

  std::size_t points_for(std::size_t n) const;
};

/// Reservoir margin applied to every coordinate's upper bound.
inline constexpr double kGridMargin = 1e-9;

struct GridScan {
  std::size_t evaluated = 0;  ///< grid points visited
  std::size_t feasible = 0;   ///< points that satisfied the box constraints
  std::vector<double> best_mix;  ///< empty when feasible == 0
  double best_objective = 0.0;
};

/// One unrefined pass over the full grid. Performs no existence check, so it
/// can confirm that an infeasible scenario has no feasible grid point.
GridScan scan_grid(const Scenario& s, const GridSpec& g = {});

struct GridResult {
  Solution solution;
  std::vector<double> round_objectives;  ///< incumbent after each round
  std::size_t feasible_points = 0;       ///< in the initial pass
};

/// Throws InfeasibleScenario, EmptyGrid, or std::invalid_argument when N is
/// outside [1, 4] or points_per_axis < 3.
GridResult grid_search_detailed(const Scenario& s, const GridSpec& g = {});

/// Best grid point, status NumericBestEffort.
Solution grid_search(const Scenario& s, const GridSpec& g = {});

/// objective(sol) <= grid objective * (1 + rel_tol).
bool certify(const Solution& sol, const Scenario& s, const GridSpec& g, double rel_tol);

}  // namespace feedmix
