#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "feedmix/model.hpp"

namespace feedmix {

struct SolverConfig {
  std::size_t max_iters = 5000;
  double step_tol = 1e-12;          ///< relative step-size stop
  std::size_t multi_starts = 20;
  std::uint64_t seed = 0;
  double barrier_shrink = 1e-9;     ///< upper bound is (1 - shrink) W/mu
  std::size_t support_enum_limit = 12;
  double grad_eps = 1e-12;          ///< transport derivative evaluated at max(x, grad_eps)
};

/// Throws std::invalid_argument on a non-positive field or
/// barrier_shrink >= 1e-3.
void validate(const SolverConfig& cfg);

/// dF/dx_i through the CES outer function. Off-constraint points are fine.
/// Throws SaturatedReservoir.
std::vector<double> gradient(std::span<const double> x, const Scenario& s,
                             double grad_eps = 1e-12);

struct KktReport {
  std::vector<std::size_t> active;   ///< coordinates with x_i > active_tol
  std::vector<double> stationarity;  ///< gradient_i - xi lambda_i, aligned with `active`
  double xi_estimate = 0.0;          ///< least-squares multiplier over `active`
  double primal = 0.0;               ///< |sum lambda_i x_i - Q|

  double max_stationarity() const;
};

KktReport kkt_residual(std::span<const double> x, const Scenario& s, double active_tol = 1e-10,
                       double grad_eps = 1e-12);

/// Euclidean projection of y onto {sum_k weights_k x_k = target,
/// 0 <= x_k <= upper_k}. upper_k may be +infinity. The set must be
/// non-empty.
std::vector<double> project_onto_slice(std::span<const double> y, std::span<const double> weights,
                                       std::span<const double> upper, double target);

struct DescentRun {
  std::vector<double> mix;  ///< full-length allocation
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Objective after each accepted step, when recorded. Small steps are
  /// tracked through accumulated differences, so the tail can differ from
  /// objective(mix) in the last digits.
  std::vector<double> history;
};

/// Projected gradient descent on the face spanned by `support` (sorted
/// indices; other coordinates stay at zero), starting from the projection of
/// `start` (full length) onto that face.
DescentRun projected_gradient_descent(const Scenario& s, std::span<const std::size_t> support,
                                      std::span<const double> start, const SolverConfig& cfg,
                                      bool record_history = false);

/// Random feasible points on the face `support`: the first is the
/// eta-construction point, the rest random convex combinations of vertices.
std::vector<std::vector<double>> starting_points(const Scenario& s,
                                                 std::span<const std::size_t> support,
                                                 const SolverConfig& cfg, std::uint64_t stream);

/// Full numerical method: support enumeration (or greedy supports by
/// potential when N > support_enum_limit) with multi-start projected
/// gradient descent. Status NumericBestEffort. Throws InfeasibleScenario,
/// or NonConvergence carrying the best iterate.
Solution solve_general(const Scenario& s, const SolverConfig& cfg = {});

/// Delegates theorem regimes to the closed-form solvers and everything else
/// to solve_general.
Solution solve(const Scenario& s, const SolverConfig& cfg = {});

}  // namespace feedmix
