#include "feedmix/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "feedmix/errors.hpp"

namespace feedmix {

namespace {

void check_dimension(std::span<const double> x, const Scenario& s) {
  if (x.size() != s.size()) {
    throw DimensionMismatch("mix has " + std::to_string(x.size()) +
                            " entries, scenario has " + std::to_string(s.size()) +
                            " feedstocks");
  }
}

std::string record_label(const Scenario& s, std::size_t i) {
  const auto& name = s.feedstocks[i].name;
  return "feedstock " + std::to_string(i) + (name.empty() ? "" : " (" + name + ")");
}

}  // namespace

std::string_view to_string(Status status) {
  switch (status) {
    case Status::InteriorOptimum: return "InteriorOptimum";
    case Status::BoundaryOptimum: return "BoundaryOptimum";
    case Status::CriticalPointIsMaximum: return "CriticalPointIsMaximum";
    case Status::Infeasible: return "Infeasible";
    case Status::NumericBestEffort: return "NumericBestEffort";
  }
  return "?";
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::LinearFree: return "LinearFree";
    case Regime::TransportNoScarcity: return "TransportNoScarcity";
    case Regime::ScarcityFreeTransport: return "ScarcityFreeTransport";
    case Regime::General: return "General";
  }
  return "?";
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& msg) { throw InvalidScenario(msg); };
  if (s.feedstocks.empty()) fail("scenario needs at least one feedstock");
  if (!(s.demand > 0.0) || !std::isfinite(s.demand)) fail("Q must be positive and finite");
  if (!(s.transport_exponent > 0.0 && s.transport_exponent < 1.0))
    fail("gamma must lie in (0, 1)");
  if (!(s.ces_exponent > 0.0) || !std::isfinite(s.ces_exponent))
    fail("r must be positive and finite");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& f = s.feedstocks[i];
    const auto who = record_label(s, i);
    if (!(f.conversion > 0.0) || !std::isfinite(f.conversion)) fail(who + ": lambda must be positive");
    if (!(f.footprint > 0.0) || !std::isfinite(f.footprint)) fail(who + ": mu must be positive");
    if (!(f.unit_cost >= 0.0) || !std::isfinite(f.unit_cost)) fail(who + ": c must be non-negative");
    if (!(f.transport_cost >= 0.0) || !std::isfinite(f.transport_cost))
      fail(who + ": C must be non-negative");
    if (f.reservoir.is_bounded() &&
        (!(f.reservoir.volume() > 0.0) || !std::isfinite(f.reservoir.volume())))
      fail(who + ": W must be positive (use null for an unbounded reservoir)");
  }
}

double total_cost(std::span<const double> x, const Scenario& s) {
  check_dimension(x, s);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = s.feedstocks[i];
    if (x[i] == 0.0) continue;
    sum += f.unit_cost * x[i] + f.transport_cost * std::pow(x[i], s.transport_exponent);
  }
  return sum;
}

double water_impact(std::span<const double> x, const Scenario& s) {
  check_dimension(x, s);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = s.feedstocks[i];
    const double use = f.footprint * x[i];
    if (!f.reservoir.is_bounded()) {
      sum += use;
      continue;
    }
    const double w = f.reservoir.volume();
    if (use >= w) {
      throw SaturatedReservoir(i, record_label(s, i) + " would consume its whole reservoir");
    }
    sum += w / std::fma(-f.footprint, x[i], w) * use;
  }
  return sum;
}

double ces(double a, double b, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("CES exponent must be positive");
  if (r == 1.0) return a + b;
  const double m = std::max(a, b);
  if (m == 0.0) return 0.0;
  // Factor out the larger argument so large r does not overflow.
  const double ta = std::pow(a / m, r);
  const double tb = std::pow(b / m, r);
  return m * std::pow(ta + tb, 1.0 / r);
}

double objective(std::span<const double> x, const Scenario& s) {
  return ces(total_cost(x, s), water_impact(x, s), s.ces_exponent);
}

double reservoir_limit(const FeedstockRecord& f) {
  if (!f.reservoir.is_bounded()) return std::numeric_limits<double>::infinity();
  return f.reservoir.volume() / f.footprint;
}

double reservoir_capacity(const Scenario& s) {
  double sum = 0.0;
  for (const auto& f : s.feedstocks) {
    if (!f.reservoir.is_bounded()) return std::numeric_limits<double>::infinity();
    sum += f.conversion * f.reservoir.volume() / f.footprint;
  }
  return sum;
}

bool existence_condition(const Scenario& s) { return reservoir_capacity(s) > s.demand; }

std::vector<double> feasible_point(const Scenario& s) {
  if (!existence_condition(s)) {
    throw InfeasibleScenario("combined reservoir capacity " +
                             std::to_string(reservoir_capacity(s)) +
                             " does not exceed demand " + std::to_string(s.demand));
  }
  std::vector<double> x(s.size(), 0.0);
  const double capacity = reservoir_capacity(s);
  if (std::isfinite(capacity)) {
    const double eta = s.demand / capacity;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = eta * reservoir_limit(s.feedstocks[i]);
    return x;
  }
  double norm2 = 0.0;
  for (const auto& f : s.feedstocks) {
    if (!f.reservoir.is_bounded()) norm2 += f.conversion * f.conversion;
  }
  const double scale = s.demand / norm2;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = s.feedstocks[i];
    if (!f.reservoir.is_bounded()) x[i] = scale * f.conversion;
  }
  return x;
}

bool is_feasible(std::span<const double> x, const Scenario& s, double feas_tol) {
  if (x.size() != s.size()) return false;
  double produced = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& f = s.feedstocks[i];
    if (!(x[i] >= 0.0) || !std::isfinite(x[i])) return false;
    if (f.reservoir.is_bounded() && !(f.footprint * x[i] < f.reservoir.volume())) return false;
    produced += f.conversion * x[i];
  }
  return std::abs(produced - s.demand) <= feas_tol * s.demand;
}

double productive_potential(const Scenario& s, std::size_t i) {
  if (i >= s.size()) throw std::out_of_range("feedstock index " + std::to_string(i) + " out of range");
  const auto& f = s.feedstocks[i];
  return (f.unit_cost + f.footprint) / f.conversion;
}

std::vector<double> productive_potentials(const Scenario& s) {
  std::vector<double> p(s.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = productive_potential(s, i);
  return p;
}

PotentialExtreme xi_bar(const Scenario& s) {
  PotentialExtreme best{productive_potential(s, 0), 0};
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double p = productive_potential(s, i);
    if (p > best.value) best = {p, i};
  }
  return best;
}

PotentialExtreme min_potential(const Scenario& s) {
  PotentialExtreme best{productive_potential(s, 0), 0};
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double p = productive_potential(s, i);
    if (p < best.value) best = {p, i};
  }
  return best;
}

}  // namespace feedmix
