#include "feedmix/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "feedmix/errors.hpp"
#include "feedmix/roots.hpp"

namespace feedmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_regime(const Scenario& s, Regime expected, const char* solver) {
  validate(s);
  const auto d = diagnose(s);
  if (d.regime != expected) {
    throw RegimeMismatch(std::string(solver) + " requires the " + std::string(to_string(expected)) +
                         " regime, scenario is " + std::string(to_string(d.regime)));
  }
}

// Offsets g_i = xi_bar - P_i >= 0. Parametrizing the multiplier as
// xi = xi_bar + d keeps the xi_bar summand free of cancellation.
std::vector<double> potential_gaps(const Scenario& s, double xi_ref) {
  std::vector<double> g(s.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = xi_ref - productive_potential(s, i);
  return g;
}

double transport_allocation_at_gap(const Scenario& s, std::size_t i, double gap) {
  const auto& f = s.feedstocks[i];
  const double gamma = s.transport_exponent;
  const double base = f.conversion * gap / (gamma * f.transport_cost);
  if (base <= 0.0) return kInf;
  return std::pow(base, 1.0 / (gamma - 1.0));
}

// (W/mu)(1 - 1/sqrt(1+t)) with t = lambda (xi - P) / mu, written without
// the subtraction.
double scarcity_allocation_at_gap(const Scenario& s, std::size_t i, double gap) {
  const auto& f = s.feedstocks[i];
  if (gap <= 0.0) return 0.0;
  if (!f.reservoir.is_bounded()) return kInf;
  const double t = f.conversion * gap / f.footprint;
  const double root = std::sqrt(1.0 + t);
  return reservoir_limit(f) * t / (root * (1.0 + root));
}

// Among the doubles within a few ulps of x, the one whose marginal burden
// c + mu W^2 / (W - mu x)^2 lands closest to xi lambda. Near a reservoir the
// burden moves by many ulps per ulp of x.
double polish_scarcity(const Scenario& s, std::size_t i, double xi, double x) {
  const auto& f = s.feedstocks[i];
  const double w = f.reservoir.volume();
  auto miss = [&](double v) {
    const double slack = std::fma(-f.footprint, v, w);
    if (!(slack > 0.0) || v < 0.0) return kInf;
    return std::abs(f.unit_cost + f.footprint * w * w / (slack * slack) - xi * f.conversion);
  };
  double best = x, best_miss = miss(x);
  for (const double dir : {-kInf, kInf}) {
    double v = x;
    for (int k = 0; k < 4; ++k) {
      v = std::nextafter(v, dir);
      const double m = miss(v);
      if (m < best_miss) {
        best = v;
        best_miss = m;
      }
    }
  }
  return best;
}

// Bit mask helpers for support enumeration. Supports are compared
// lexicographically as sorted index lists.
bool support_less(std::uint64_t a, std::uint64_t b) {
  while (a != 0 && b != 0) {
    const int ia = __builtin_ctzll(a);
    const int ib = __builtin_ctzll(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

void check_enum_limit(const Scenario& s, const AnalyticConfig& cfg) {
  if (s.size() > cfg.support_enum_limit || s.size() > 62) {
    throw SupportEnumerationOverflow("support enumeration limited to " +
                                     std::to_string(cfg.support_enum_limit) + " feedstocks, got " +
                                     std::to_string(s.size()));
  }
}

Solution single_feedstock(const Scenario& s, Regime regime) {
  Solution sol;
  sol.mix = {s.demand / s.feedstocks[0].conversion};
  if (!is_feasible(sol.mix, s)) {
    throw InfeasibleScenario("single feedstock cannot meet demand within its reservoir");
  }
  sol.objective = objective(sol.mix, s);
  sol.status = Status::InteriorOptimum;
  sol.regime = regime;
  return sol;
}

}  // namespace

RegimeDiagnosis diagnose(const Scenario& s) {
  RegimeDiagnosis d;
  const bool linear = s.ces_exponent == 1.0;
  const bool free_transport =
      std::all_of(s.feedstocks.begin(), s.feedstocks.end(),
                  [](const FeedstockRecord& f) { return f.transport_cost == 0.0; });
  const bool no_scarcity =
      std::all_of(s.feedstocks.begin(), s.feedstocks.end(),
                  [](const FeedstockRecord& f) { return !f.reservoir.is_bounded(); });

  d.reasons.push_back(linear ? "r = 1 (linear CES)" : "r != 1 (nonlinear CES)");
  d.reasons.push_back(free_transport ? "all C_i = 0 (free transport)"
                                     : "some C_i > 0 (transport cost)");
  d.reasons.push_back(no_scarcity ? "all W_i unbounded (no water scarcity)"
                                  : "some W_i finite (water scarcity)");

  if (linear && free_transport && no_scarcity) {
    d.regime = Regime::LinearFree;
  } else if (linear && no_scarcity) {
    d.regime = Regime::TransportNoScarcity;
  } else if (linear && free_transport) {
    d.regime = Regime::ScarcityFreeTransport;
  } else {
    d.regime = Regime::General;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Linear, free transport, no scarcity

bool interchangeable_linear(const Scenario& s, double tol) {
  const double hi = xi_bar(s).value;
  const double lo = min_potential(s).value;
  return hi - lo <= tol * hi;
}

Solution solve_linear_free(const Scenario& s, const AnalyticConfig& cfg) {
  require_regime(s, Regime::LinearFree, "solve_linear_free");
  if (s.size() == 1) {
    auto sol = single_feedstock(s, Regime::LinearFree);
    sol.xi = productive_potential(s, 0);
    return sol;
  }
  const auto best = min_potential(s);
  const auto potentials = productive_potentials(s);
  const double cutoff = best.value * (1.0 + cfg.pot_tol);
  const auto in_band = static_cast<std::size_t>(std::count_if(
      potentials.begin(), potentials.end(), [cutoff](double p) { return p <= cutoff; }));

  Solution sol;
  sol.regime = Regime::LinearFree;
  sol.xi = best.value;
  if (in_band == s.size()) {
    // F = xi Q on the whole feasible set; any feasible point is optimal.
    sol.mix = feasible_point(s);
    sol.status = Status::InteriorOptimum;
  } else {
    const auto j = static_cast<std::size_t>(
        std::find_if(potentials.begin(), potentials.end(), [cutoff](double p) { return p <= cutoff; }) -
        potentials.begin());
    sol.mix.assign(s.size(), 0.0);
    sol.mix[j] = s.demand / s.feedstocks[j].conversion;
    sol.status = Status::BoundaryOptimum;
  }
  sol.objective = objective(sol.mix, s);
  return sol;
}

// ---------------------------------------------------------------------------
// Transport, no scarcity

double transport_allocation(const Scenario& s, std::size_t i, double xi) {
  return transport_allocation_at_gap(s, i, xi - productive_potential(s, i));
}

double transport_production(const Scenario& s, double xi) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    sum += s.feedstocks[i].conversion * transport_allocation(s, i, xi);
  return sum;
}

std::vector<double> transport_hessian_diagonal(const Scenario& s, std::span<const double> x) {
  const double gamma = s.transport_exponent;
  std::vector<double> h(s.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] = gamma * (gamma - 1.0) * s.feedstocks[i].transport_cost * std::pow(x[i], gamma - 2.0);
  }
  return h;
}

CriticalPoint transport_critical_point(const Scenario& s, const AnalyticConfig& cfg) {
  require_regime(s, Regime::TransportNoScarcity, "transport_critical_point");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s.feedstocks[i].transport_cost > 0.0)) {
      throw RegimeMismatch("transport_critical_point requires C_i > 0 for every feedstock (index " +
                           std::to_string(i) + " has C = 0)");
    }
  }
  const double xib = xi_bar(s).value;
  const auto gaps = potential_gaps(s, xib);
  auto production = [&](double d) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      sum += s.feedstocks[i].conversion * transport_allocation_at_gap(s, i, gaps[i] + d);
    return sum;
  };
  const double q = s.demand;

  // P -> inf as d -> 0, so d = 0 always brackets from below.
  double lo = xib * 1e-12;
  if (!(production(lo) > q)) lo = 0.0;
  double hi = 1.0;
  std::size_t doublings = 0;
  while (production(hi) > q) {
    if (++doublings > cfg.max_doublings) {
      throw RootBracketFailure("could not bracket the transport multiplier");
    }
    hi *= 2.0;
  }
  const auto root = bisect_monotone(production, lo, hi, q, cfg.root_value_tol * q, [&](double d) {
    return cfg.root_width_tol * std::max(1.0, xib + d);
  });

  CriticalPoint cp;
  cp.xi = xib + root.root;
  cp.mix.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    cp.mix[i] = transport_allocation_at_gap(s, i, gaps[i] + root.root);
  cp.production = root.value;
  cp.hessian_diagonal = transport_hessian_diagonal(s, cp.mix);
  return cp;
}

Solution to_solution(const CriticalPoint& cp, const Scenario& s) {
  Solution sol;
  sol.mix = cp.mix;
  sol.objective = objective(cp.mix, s);
  sol.xi = cp.xi;
  sol.status = Status::CriticalPointIsMaximum;
  sol.regime = diagnose(s).regime;
  return sol;
}

Solution solve_transport_no_scarcity(const Scenario& s, const AnalyticConfig& cfg) {
  require_regime(s, Regime::TransportNoScarcity, "solve_transport_no_scarcity");
  const std::size_t n = s.size();
  auto vertex_multiplier = [&](std::size_t j, double xj) {
    const auto& f = s.feedstocks[j];
    const double gamma = s.transport_exponent;
    return (f.unit_cost + gamma * f.transport_cost * std::pow(xj, gamma - 1.0) + f.footprint) /
           f.conversion;
  };
  if (n == 1) {
    auto sol = single_feedstock(s, Regime::TransportNoScarcity);
    sol.xi = vertex_multiplier(0, sol.mix[0]);
    return sol;
  }
  check_enum_limit(s, cfg);

  // On every face the objective is concave (linear plus C_i x_i^gamma), so
  // the only stationary point of a face is a maximum and its minimum lies on
  // a smaller face. best[mask] is the optimum over the closure of face
  // `mask`, built up from the single-feedstock vertices.
  struct Best {
    double objective;
    std::uint64_t support;
  };
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<Best> best(full + 1, Best{kInf, 0});
  std::vector<double> x(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(x.begin(), x.end(), 0.0);
    x[j] = s.demand / s.feedstocks[j].conversion;
    best[std::uint64_t{1} << j] = {objective(x, s), std::uint64_t{1} << j};
  }
  for (std::uint64_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;
    Best b{kInf, 0};
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
      const auto& child = best[mask & ~(rest & -rest)];
      if (child.objective < b.objective ||
          (child.objective == b.objective && support_less(child.support, b.support))) {
        b = child;
      }
    }
    best[mask] = b;
  }

  const auto j = static_cast<std::size_t>(__builtin_ctzll(best[full].support));
  Solution sol;
  sol.mix.assign(n, 0.0);
  sol.mix[j] = s.demand / s.feedstocks[j].conversion;
  sol.objective = objective(sol.mix, s);
  sol.xi = vertex_multiplier(j, sol.mix[j]);
  sol.status = Status::BoundaryOptimum;
  sol.regime = Regime::TransportNoScarcity;
  return sol;
}

// ---------------------------------------------------------------------------
// Free transport, water scarcity

double scarcity_allocation(const Scenario& s, std::size_t i, double xi) {
  return scarcity_allocation_at_gap(s, i, xi - productive_potential(s, i));
}

double scarcity_production(const Scenario& s, double xi) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    sum += s.feedstocks[i].conversion * scarcity_allocation(s, i, xi);
  return sum;
}

std::vector<double> scarcity_hessian_diagonal(const Scenario& s, std::span<const double> x) {
  std::vector<double> h(s.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& f = s.feedstocks[i];
    if (!f.reservoir.is_bounded()) {
      h[i] = 0.0;
      continue;
    }
    const double w = f.reservoir.volume();
    const double slack = std::fma(-f.footprint, x[i], w);
    h[i] = 2.0 * w * w * f.footprint * f.footprint / (slack * slack * slack);
  }
  return h;
}

CompensationReport compensation_condition(const Scenario& s) {
  validate(s);
  const std::size_t n = s.size();
  if (n < 2) throw RegimeMismatch("compensation condition needs at least two feedstocks");
  for (const auto& f : s.feedstocks) {
    if (!f.reservoir.is_bounded()) {
      throw RegimeMismatch("compensation condition needs every reservoir finite");
    }
  }
  const auto top = xi_bar(s);
  const auto& fbar = s.feedstocks[top.index];
  CompensationReport report;
  report.max_index = top.index;
  report.holds = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == top.index) continue;
    const auto& f = s.feedstocks[i];
    const double m = std::max(
        0.0, 1.0 - s.demand * f.footprint /
                       (f.reservoir.volume() * f.conversion * static_cast<double>(n - 1)));
    CompensationTerm t;
    t.index = i;
    t.m = m;
    t.lhs = m * m * fbar.unit_cost / fbar.conversion + m * m * fbar.footprint / fbar.conversion;
    t.rhs = m * m * f.unit_cost / f.conversion + f.footprint / f.conversion;
    t.holds = t.lhs < t.rhs;
    report.holds = report.holds && t.holds;
    report.terms.push_back(t);
  }
  report.p_at_xi_bar = scarcity_production(s, top.value);
  return report;
}

namespace {

// Interior optimum of the scarcity problem restricted to `support` (a face
// with the other coordinates fixed at zero). Returns false if the face has
// no stationary point with every support coordinate positive.
bool scarcity_interior_on_support(const Scenario& s, std::uint64_t support,
                                  const AnalyticConfig& cfg, std::vector<double>& x, double& xi) {
  const std::size_t n = s.size();
  x.assign(n, 0.0);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (support >> i & 1U) idx.push_back(i);

  if (idx.size() == 1) {
    const auto j = idx.front();
    const auto& f = s.feedstocks[j];
    x[j] = s.demand / f.conversion;
    if (f.reservoir.is_bounded() && !(f.footprint * x[j] < f.reservoir.volume())) return false;
    if (f.reservoir.is_bounded()) {
      const double w = f.reservoir.volume();
      const double slack = std::fma(-f.footprint, x[j], w);
      xi = (f.unit_cost + f.footprint * w * w / (slack * slack)) / f.conversion;
    } else {
      xi = productive_potential(s, j);
    }
    return true;
  }

  std::vector<std::size_t> bounded, unbounded;
  for (auto i : idx) (s.feedstocks[i].reservoir.is_bounded() ? bounded : unbounded).push_back(i);

  if (!unbounded.empty()) {
    // Unbounded records have constant marginal burden P_j, which pins the
    // multiplier; they must agree and dominate every bounded potential.
    const double pu = productive_potential(s, unbounded.front());
    for (auto j : unbounded) {
      if (std::abs(productive_potential(s, j) - pu) > cfg.pot_tol * pu) return false;
    }
    double produced = 0.0;
    for (auto i : bounded) {
      if (!(productive_potential(s, i) < pu)) return false;
      x[i] = scarcity_allocation(s, i, pu);
      produced += s.feedstocks[i].conversion * x[i];
    }
    const double remainder = s.demand - produced;
    if (!(remainder > 0.0)) return false;
    double norm2 = 0.0;
    for (auto j : unbounded) norm2 += s.feedstocks[j].conversion * s.feedstocks[j].conversion;
    for (auto j : unbounded) x[j] = remainder * s.feedstocks[j].conversion / norm2;
    xi = pu;
    return true;
  }

  double capacity = 0.0;
  double top = -kInf;
  for (auto i : idx) {
    capacity += s.feedstocks[i].conversion * reservoir_limit(s.feedstocks[i]);
    top = std::max(top, productive_potential(s, i));
  }
  if (!(capacity > s.demand)) return false;

  std::vector<double> gaps(n, 0.0);
  for (auto i : idx) gaps[i] = top - productive_potential(s, i);
  auto production = [&](double d) {
    double sum = 0.0;
    for (auto i : idx) sum += s.feedstocks[i].conversion * scarcity_allocation_at_gap(s, i, gaps[i] + d);
    return sum;
  };
  const double q = s.demand;
  if (!(production(0.0) < q)) return false;

  double hi = 1.0;
  std::size_t doublings = 0;
  while (production(hi) < q) {
    if (++doublings > cfg.max_doublings) {
      throw RootBracketFailure("could not bracket the scarcity multiplier");
    }
    hi *= 2.0;
  }
  const auto root = bisect_monotone(production, 0.0, hi, q, cfg.root_value_tol * q, [&](double d) {
    return cfg.root_width_tol * std::max(1.0, top + d);
  });
  xi = top + root.root;
  for (auto i : idx) x[i] = polish_scarcity(s, i, xi, scarcity_allocation_at_gap(s, i, gaps[i] + root.root));
  return true;
}

}  // namespace

Solution solve_scarcity_free_transport(const Scenario& s, const AnalyticConfig& cfg) {
  require_regime(s, Regime::ScarcityFreeTransport, "solve_scarcity_free_transport");
  if (!existence_condition(s)) {
    throw InfeasibleScenario("combined reservoir capacity does not exceed demand");
  }
  const std::size_t n = s.size();
  if (n == 1) {
    auto sol = single_feedstock(s, Regime::ScarcityFreeTransport);
    std::vector<double> x;
    double xi = 0.0;
    scarcity_interior_on_support(s, 1, cfg, x, xi);
    sol.xi = xi;
    return sol;
  }

  Solution sol;
  sol.regime = Regime::ScarcityFreeTransport;

  const bool all_finite = std::all_of(s.feedstocks.begin(), s.feedstocks.end(),
                                      [](const FeedstockRecord& f) { return f.reservoir.is_bounded(); });
  if (all_finite && scarcity_production(s, xi_bar(s).value) < s.demand) {
    const std::uint64_t full = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    std::vector<double> x;
    double xi = 0.0;
    if (n < 64 && scarcity_interior_on_support(s, full, cfg, x, xi)) {
      sol.mix = std::move(x);
      sol.xi = xi;
      sol.objective = objective(sol.mix, s);
      sol.status = Status::InteriorOptimum;
      return sol;
    }
  }

  // No all-positive stationary point: the objective is convex, so the best
  // face-interior stationary point over all supports is the global minimum.
  check_enum_limit(s, cfg);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  bool found = false;
  std::uint64_t best_support = 0;
  std::vector<double> x;
  for (std::uint64_t mask = 1; mask <= full; ++mask) {
    double xi = 0.0;
    if (!scarcity_interior_on_support(s, mask, cfg, x, xi)) continue;
    const double value = objective(x, s);
    if (!found || value < sol.objective ||
        (value == sol.objective && support_less(mask, best_support))) {
      found = true;
      best_support = mask;
      sol.mix = x;
      sol.objective = value;
      sol.xi = xi;
    }
  }
  if (!found) {
    throw InfeasibleScenario("no support admits a feasible stationary point");
  }
  sol.status = best_support == full ? Status::InteriorOptimum : Status::BoundaryOptimum;
  return sol;
}

Solution solve_analytic(const Scenario& s, const AnalyticConfig& cfg) {
  validate(s);
  switch (diagnose(s).regime) {
    case Regime::LinearFree: return solve_linear_free(s, cfg);
    case Regime::TransportNoScarcity: return solve_transport_no_scarcity(s, cfg);
    case Regime::ScarcityFreeTransport: return solve_scarcity_free_transport(s, cfg);
    case Regime::General: break;
  }
  throw RegimeMismatch("no closed-form solver for the General regime");
}

}  // namespace feedmix
