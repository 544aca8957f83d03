#pragma once

// Closed-form and one-dimensional solvers for the linear-CES regimes.
//
// With r = 1 the objective separates per feedstock and the stationarity
// condition of the Lagrangian can be solved for each x_i as a function of
// the multiplier xi. The demand equation then becomes a scalar monotone
// equation P(xi) = Q, solved by bisection.

#include <cstddef>
#include <string>
#include <vector>

#include "feedmix/model.hpp"

namespace feedmix {

struct RegimeDiagnosis {
  Regime regime = Regime::General;
  std::vector<std::string> reasons;
};

RegimeDiagnosis diagnose(const Scenario& s);

struct AnalyticConfig {
  double pot_tol = 1e-9;                 ///< relative potential-equality tolerance
  double root_value_tol = 1e-10;         ///< |P(xi) - Q| <= root_value_tol * Q
  double root_width_tol = 1e-12;         ///< bracket <= root_width_tol * max(1, xi)
  std::size_t max_doublings = 200;
  std::size_t support_enum_limit = 12;
};

/// r = 1, free transport, unbounded reservoirs: concentrate on the lowest
/// potential feedstock, or spread over all when every potential is equal.
Solution solve_linear_free(const Scenario& s, const AnalyticConfig& cfg = {});

/// max P - min P <= tol * max P.
bool interchangeable_linear(const Scenario& s, double tol = 1e-9);

// Transport regime (r = 1, unbounded reservoirs, C_i > 0).

/// x_i(xi) = ((xi lambda_i - c_i - mu_i) / (gamma C_i))^(1/(gamma-1)).
/// Defined for xi > P_i; infinite at xi == P_i.
double transport_allocation(const Scenario& s, std::size_t i, double xi);

/// sum_i lambda_i x_i(xi); strictly decreasing on (xi_bar, inf).
double transport_production(const Scenario& s, double xi);

/// Diagonal of the Hessian of F: gamma (gamma-1) C_i x_i^(gamma-2).
std::vector<double> transport_hessian_diagonal(const Scenario& s, std::span<const double> x);

struct CriticalPoint {
  std::vector<double> mix;
  double xi = 0.0;
  double production = 0.0;  ///< P(xi) at the returned multiplier
  std::vector<double> hessian_diagonal;
};

/// Unique stationary point of the Lagrangian on the demand constraint. It is
/// a constrained local maximum, not an optimum. Throws RegimeMismatch when
/// some C_i == 0 and RootBracketFailure if P(xi) cannot be bracketed.
CriticalPoint transport_critical_point(const Scenario& s, const AnalyticConfig& cfg = {});

/// Wraps a critical point as a Solution tagged CriticalPointIsMaximum.
Solution to_solution(const CriticalPoint& cp, const Scenario& s);

/// Best boundary optimum of the transport regime by exhaustive support
/// enumeration. Throws SupportEnumerationOverflow for N > support_enum_limit.
Solution solve_transport_no_scarcity(const Scenario& s, const AnalyticConfig& cfg = {});

// Scarcity regime (r = 1, C_i == 0, finite reservoirs).

/// x_i(xi) = (W_i/mu_i) (1 - sqrt(mu_i / (xi lambda_i - c_i))), zero at
/// xi == P_i. Requires xi >= P_i.
double scarcity_allocation(const Scenario& s, std::size_t i, double xi);

/// sum_i lambda_i x_i(xi) at xi >= xi_bar; strictly increasing and bounded
/// by the reservoir capacity.
double scarcity_production(const Scenario& s, double xi);

/// Diagonal of the Hessian of F: 2 W_i^2 mu_i^2 / (W_i - mu_i x_i)^3.
std::vector<double> scarcity_hessian_diagonal(const Scenario& s, std::span<const double> x);

struct CompensationTerm {
  std::size_t index;
  double m;    ///< max{0, 1 - Q mu_i / (W_i lambda_i (N-1))}
  double lhs;  ///< m^2 (c_ibar + mu_ibar) / lambda_ibar
  double rhs;  ///< m^2 c_i / lambda_i + mu_i / lambda_i
  bool holds;  ///< lhs < rhs
};

struct CompensationReport {
  std::size_t max_index = 0;        ///< index attaining xi_bar
  std::vector<CompensationTerm> terms;  ///< one per i != max_index
  bool holds = false;               ///< every term holds
  double p_at_xi_bar = 0.0;         ///< P(xi_bar); interior optimum iff < Q
};

/// Requires N >= 2 and every reservoir finite (RegimeMismatch otherwise).
CompensationReport compensation_condition(const Scenario& s);

/// Unique interior optimum when P(xi_bar) < Q; otherwise the best boundary
/// optimum over supports (status BoundaryOptimum). Throws InfeasibleScenario.
Solution solve_scarcity_free_transport(const Scenario& s, const AnalyticConfig& cfg = {});

/// Dispatches on diagnose(s). Throws RegimeMismatch for the General regime.
Solution solve_analytic(const Scenario& s, const AnalyticConfig& cfg = {});

}  // namespace feedmix
