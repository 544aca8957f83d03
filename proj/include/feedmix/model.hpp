#pragma once

// Domain types and objective evaluation for the feedstock import program:
//
//   min  F(x) = CES(total_cost(x), water_impact(x); r)
//   s.t. sum_i lambda_i x_i = Q,  0 <= x_i < W_i / mu_i.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace feedmix {

/// Water available in the exporting country. Either a finite positive
/// volume or unbounded, in which case the scarcity weight W/(W - mu x) is
/// exactly 1.
class Reservoir {
 public:
  static Reservoir unbounded() { return Reservoir{}; }
  static Reservoir finite(double volume) { return Reservoir{volume}; }

  bool is_bounded() const noexcept { return volume_.has_value(); }
  /// Precondition: is_bounded().
  double volume() const { return volume_.value(); }

  friend bool operator==(const Reservoir&, const Reservoir&) = default;

 private:
  Reservoir() = default;
  explicit Reservoir(double v) : volume_(v) {}
  std::optional<double> volume_;
};

/// One country-feedstock import option.
struct FeedstockRecord {
  std::string name;
  double conversion = 1.0;      ///< commodity units per feedstock unit
  double unit_cost = 0.0;       ///< currency per feedstock unit
  double transport_cost = 0.0;  ///< coefficient of the x^gamma transport term
  double footprint = 1.0;       ///< water units per feedstock unit
  Reservoir reservoir = Reservoir::unbounded();

  friend bool operator==(const FeedstockRecord&, const FeedstockRecord&) = default;
};

struct Scenario {
  std::vector<FeedstockRecord> feedstocks;
  double demand = 1.0;               ///< commodity quantity to produce
  double transport_exponent = 0.5;   ///< in (0, 1)
  double ces_exponent = 1.0;         ///< > 0

  std::size_t size() const noexcept { return feedstocks.size(); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class Status {
  InteriorOptimum,
  BoundaryOptimum,
  CriticalPointIsMaximum,
  Infeasible,
  NumericBestEffort,
};

enum class Regime {
  LinearFree,
  TransportNoScarcity,
  ScarcityFreeTransport,
  General,
};

std::string_view to_string(Status status);
std::string_view to_string(Regime regime);

struct Solution {
  std::vector<double> mix;
  double objective = 0.0;
  std::optional<double> xi;  ///< Lagrange multiplier of the demand constraint
  Status status = Status::NumericBestEffort;
  Regime regime = Regime::General;
};

inline constexpr double kDefaultFeasTol = 1e-9;

/// Throws InvalidScenario naming the first violated invariant.
void validate(const Scenario& s);

/// Sum of c_i x_i + C_i x_i^gamma, with 0^gamma = 0.
double total_cost(std::span<const double> x, const Scenario& s);

/// Sum of W_i/(W_i - mu_i x_i) * mu_i x_i; weight 1 for unbounded reservoirs.
/// Throws SaturatedReservoir when mu_i x_i >= W_i.
double water_impact(std::span<const double> x, const Scenario& s);

/// (a^r + b^r)^(1/r); exactly a + b when r == 1.
double ces(double a, double b, double r);

/// F(x). Does not require the demand constraint to hold.
double objective(std::span<const double> x, const Scenario& s);

/// Largest allocation record i can take before saturating its reservoir
/// (infinity when unbounded).
double reservoir_limit(const FeedstockRecord& f);

/// sum_i lambda_i W_i / mu_i > Q (always true with an unbounded reservoir).
bool existence_condition(const Scenario& s);

/// sum_i lambda_i W_i / mu_i, or +infinity with any unbounded reservoir.
double reservoir_capacity(const Scenario& s);

/// A point of the feasible set. With all reservoirs finite this is
/// x_i = eta W_i/mu_i; otherwise demand is spread over the unbounded
/// records with x_i proportional to lambda_i. Throws InfeasibleScenario.
std::vector<double> feasible_point(const Scenario& s);

/// |sum lambda_i x_i - Q| <= feas_tol * Q, x_i >= 0 and mu_i x_i < W_i.
bool is_feasible(std::span<const double> x, const Scenario& s,
                 double feas_tol = kDefaultFeasTol);

/// P_i = (c_i + mu_i) / lambda_i. Throws std::out_of_range.
double productive_potential(const Scenario& s, std::size_t i);

std::vector<double> productive_potentials(const Scenario& s);

struct PotentialExtreme {
  double value;
  std::size_t index;
};

/// Maximum potential and its index; ties go to the lowest index.
PotentialExtreme xi_bar(const Scenario& s);

/// Minimum potential and its index; ties go to the lowest index.
PotentialExtreme min_potential(const Scenario& s);

}  // namespace feedmix
