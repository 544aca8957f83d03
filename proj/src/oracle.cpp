#include "feedmix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "feedmix/analytic.hpp"
#include "feedmix/errors.hpp"

namespace feedmix {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Window {
  std::vector<double> lo, hi;
};

// Visits the grid over the first N-1 coordinates in lexicographic index
// order, solving the demand equation for the last one.
GridScan scan_window(const Scenario& s, const Window& w, std::size_t points,
                     const GridScan* incumbent) {
  const std::size_t n = s.size();
  const std::size_t dims = n - 1;
  const auto& last = s.feedstocks[n - 1];
  const double last_upper = (1.0 - kGridMargin) * reservoir_limit(last);

  GridScan out;
  if (incumbent != nullptr && !incumbent->best_mix.empty()) {
    out.best_mix = incumbent->best_mix;
    out.best_objective = incumbent->best_objective;
  }
  std::vector<std::size_t> counter(dims, 0);
  std::vector<double> x(n, 0.0);
  const std::size_t steps = points - 1;
  for (;;) {
    ++out.evaluated;
    double produced = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double t = static_cast<double>(counter[d]) / static_cast<double>(steps);
      x[d] = counter[d] == steps ? w.hi[d] : w.lo[d] + t * (w.hi[d] - w.lo[d]);
      produced += s.feedstocks[d].conversion * x[d];
    }
    x[n - 1] = (s.demand - produced) / last.conversion;
    // Window ends at Q / lambda can overshoot the demand by an ulp.
    if (x[n - 1] < 0.0 && x[n - 1] > -4.0 * kEps * s.demand / last.conversion) x[n - 1] = 0.0;
    if (x[n - 1] >= 0.0 && x[n - 1] <= last_upper) {
      ++out.feasible;
      const double value = objective(x, s);
      if (out.best_mix.empty() || value < out.best_objective) {
        out.best_mix = x;
        out.best_objective = value;
      }
    }
    std::size_t d = dims;
    while (d > 0) {
      --d;
      if (++counter[d] <= steps) break;
      counter[d] = 0;
      if (d == 0) return out;
    }
    if (dims == 0) return out;
  }
}

Window full_window(const Scenario& s) {
  Window w;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const auto& f = s.feedstocks[i];
    w.lo.push_back(0.0);
    w.hi.push_back(std::min(s.demand / f.conversion, (1.0 - kGridMargin) * reservoir_limit(f)));
  }
  return w;
}

void check_spec(const Scenario& s, const GridSpec& g) {
  if (s.size() < 1 || s.size() > kMaxOracleSize) {
    throw std::invalid_argument("grid oracle supports 1 to 4 feedstocks, got " +
                                std::to_string(s.size()));
  }
  if (g.points_for(s.size()) < 3) throw std::invalid_argument("points_per_axis must be at least 3");
}

}  // namespace

std::size_t GridSpec::points_for(std::size_t n) const {
  if (points_per_axis) return *points_per_axis;
  switch (n) {
    case 2: return 2001;
    case 3: return 121;
    default: return 41;
  }
}

GridScan scan_grid(const Scenario& s, const GridSpec& g) {
  validate(s);
  check_spec(s, g);
  return scan_window(s, full_window(s), g.points_for(s.size()), nullptr);
}

GridResult grid_search_detailed(const Scenario& s, const GridSpec& g) {
  validate(s);
  check_spec(s, g);
  if (!existence_condition(s)) {
    throw InfeasibleScenario("combined reservoir capacity does not exceed demand");
  }
  const std::size_t points = g.points_for(s.size());
  const Window full = full_window(s);
  GridScan best = scan_window(s, full, points, nullptr);
  if (best.feasible == 0) {
    throw EmptyGrid("no grid point satisfies the reservoir bounds; refine the grid");
  }
  GridResult result;
  result.feasible_points = best.feasible;
  result.round_objectives.push_back(best.best_objective);

  double shrink = 1.0;
  for (std::size_t round = 0; round < g.refine_rounds && s.size() > 1; ++round) {
    shrink /= 10.0;
    Window w;
    for (std::size_t d = 0; d + 1 < s.size(); ++d) {
      const double half = 0.5 * shrink * full.hi[d];
      w.lo.push_back(std::max(0.0, best.best_mix[d] - half));
      w.hi.push_back(std::min(full.hi[d], best.best_mix[d] + half));
    }
    best = scan_window(s, w, points, &best);
    result.round_objectives.push_back(best.best_objective);
  }

  result.solution.mix = best.best_mix;
  result.solution.objective = best.best_objective;
  result.solution.status = Status::NumericBestEffort;
  result.solution.regime = diagnose(s).regime;
  return result;
}

Solution grid_search(const Scenario& s, const GridSpec& g) {
  return grid_search_detailed(s, g).solution;
}

bool certify(const Solution& sol, const Scenario& s, const GridSpec& g, double rel_tol) {
  const double reference = grid_search(s, g).objective;
  return objective(sol.mix, s) <= reference * (1.0 + rel_tol);
}

}  // namespace feedmix
