#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "feedmix/analytic.hpp"
#include "feedmix/errors.hpp"
#include "feedmix/oracle.hpp"
#include "feedmix/roots.hpp"
#include "feedmix/solver.hpp"
#include "test_support.hpp"

namespace fm = feedmix;
using fm::testing::record;
using fm::testing::scenario;

namespace {

constexpr auto kInf = std::nullopt;

fm::Scenario symmetric_transport() {
  return scenario({record(1, 1, 1, 1, kInf), record(1, 1, 1, 1, kInf)}, 2.0, 0.5);
}

fm::Scenario symmetric_scarcity() {
  return scenario({record(1, 1, 0, 1, 10.0), record(1, 1, 0, 1, 10.0)}, 2.0);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Diagnose, Examples) {
  EXPECT_EQ(fm::diagnose(scenario({record(1, 1, 0, 1, kInf), record(1, 1, 0, 1, kInf)}, 1.0)).regime,
            fm::Regime::LinearFree);
  EXPECT_EQ(fm::diagnose(scenario({record(1, 1, 1, 1, kInf), record(1, 1, 0, 1, kInf)}, 1.0)).regime,
            fm::Regime::TransportNoScarcity);
  EXPECT_EQ(fm::diagnose(scenario({record(1, 1, 0, 1, 5.0), record(1, 1, 0, 1, kInf)}, 1.0, 0.5, 2.0)).regime,
            fm::Regime::General);
  EXPECT_EQ(fm::diagnose(scenario({record(1, 1, 0, 1, 5.0), record(1, 1, 0, 1, kInf)}, 1.0)).regime,
            fm::Regime::ScarcityFreeTransport);
  EXPECT_EQ(fm::diagnose(scenario({record(1, 1, 1, 1, 5.0)}, 1.0)).regime, fm::Regime::General);
  EXPECT_FALSE(fm::diagnose(scenario({record(1, 1, 1, 1, 5.0)}, 1.0)).reasons.empty());
}

TEST(LinearFree, ConcentratesOnMinimumPotential) {
  const auto s = scenario({record(1, 1, 0, 1, kInf), record(1, 2, 0, 1, kInf)}, 3.0);
  const auto sol = fm::solve_linear_free(s);
  EXPECT_EQ(sol.mix, (std::vector<double>{3.0, 0.0}));
  EXPECT_DOUBLE_EQ(sol.objective, 6.0);
  EXPECT_DOUBLE_EQ(*sol.xi, 2.0);
  EXPECT_EQ(sol.status, fm::Status::BoundaryOptimum);
  EXPECT_EQ(sol.regime, fm::Regime::LinearFree);
}

TEST(LinearFree, EqualPotentialsAnyFeasiblePoint) {
  const auto s = scenario({record(1, 1, 0, 1, kInf), record(2, 3, 0, 1, kInf)}, 4.0);
  const auto sol = fm::solve_linear_free(s);
  EXPECT_NEAR(sol.mix[0] + 2 * sol.mix[1], 4.0, 1e-14);
  EXPECT_NEAR(sol.objective, 8.0, 1e-14);
  EXPECT_EQ(sol.status, fm::Status::InteriorOptimum);
  for (double t : {0.0, 0.3, 1.0}) {
    const std::vector<double> x{4.0 * t, 2.0 * (1 - t)};
    EXPECT_NEAR(fm::objective(x, s), 8.0, 1e-14);
  }
}

TEST(LinearFree, ThreeFeedstocksAgainstGrid) {
  // P = (5, 4, 4).
  const auto s = scenario({record(1, 4, 0, 1, kInf), record(1, 3, 0, 1, kInf), record(1, 3, 0, 1, kInf)}, 1.0);
  const auto sol = fm::solve_linear_free(s);
  EXPECT_EQ(sol.mix[0], 0.0);
  EXPECT_DOUBLE_EQ(sol.objective, 4.0);
  const auto grid = fm::grid_search(s);
  EXPECT_NEAR(grid.objective, 4.0, 1e-12);
  EXPECT_LE(sol.objective, grid.objective * (1 + 1e-12));
}

TEST(LinearFree, SingleFeedstock) {
  const auto sol = fm::solve_linear_free(scenario({record(2, 1, 0, 1, kInf)}, 3.0));
  EXPECT_DOUBLE_EQ(sol.mix[0], 1.5);
  EXPECT_DOUBLE_EQ(sol.objective, 3.0);
}

TEST(LinearFree, WrongRegimeThrows) {
  EXPECT_THROW(fm::solve_linear_free(symmetric_transport()), fm::RegimeMismatch);
}

TEST(Interchangeable, Examples) {
  const auto equal3 = scenario({record(1, 1, 0, 1, kInf), record(2, 3, 0, 1, kInf), record(0.5, 0.5, 0, 0.5, kInf)}, 1.0);
  EXPECT_TRUE(fm::interchangeable_linear(equal3));
  const auto apart = scenario({record(1, 1, 0, 1, kInf), record(1, 1.5, 0, 1, kInf)}, 1.0);
  EXPECT_FALSE(fm::interchangeable_linear(apart, 1e-9));
  const auto close = scenario({record(1, 1, 0, 1, kInf), record(1, 1 + 2e-12, 0, 1, kInf)}, 1.0);
  EXPECT_TRUE(fm::interchangeable_linear(close, 1e-9));
}

TEST(LinearFree, EqualPotentialObjectiveConstant) {
  fm::testing::Rng rng(41);
  for (int k = 0; k < 50; ++k) {
    const auto s = fm::testing::random_equal_potential(rng, fm::testing::pick(rng, 2, 5));
    const auto sol = fm::solve_linear_free(s);
    const double expected = *sol.xi * s.demand;
    for (int j = 0; j < 100; ++j) {
      const auto x = fm::testing::random_feasible_point(rng, s);
      EXPECT_LE(rel(fm::objective(x, s), expected), 1e-10);
    }
  }
}

TEST(LinearFree, ArgminInvariantUnderUniformPotentialScaling) {
  fm::testing::Rng rng(43);
  for (int k = 0; k < 100; ++k) {
    auto s = fm::testing::random_linear_free(rng, fm::testing::pick(rng, 2, 6));
    const auto before = fm::solve_linear_free(s);
    const double t = fm::testing::log_uniform(rng, 0.1, 10.0);
    for (auto& f : s.feedstocks) {
      f.unit_cost *= t;
      f.footprint *= t;
    }
    const auto after = fm::solve_linear_free(s);
    EXPECT_EQ(before.mix, after.mix);
    EXPECT_LE(rel(after.objective, t * before.objective), 1e-13);
  }
}

TEST(Transport, SymmetricCriticalPoint) {
  const auto s = symmetric_transport();
  const auto cp = fm::transport_critical_point(s);
  EXPECT_NEAR(cp.mix[0], 1.0, 1e-9);
  EXPECT_NEAR(cp.mix[1], 1.0, 1e-9);
  EXPECT_NEAR(cp.xi, 2.5, 1e-9);
  EXPECT_NEAR(cp.production, 2.0, 1e-10 * 2.0);
  ASSERT_EQ(cp.hessian_diagonal.size(), 2u);
  EXPECT_NEAR(cp.hessian_diagonal[0], -0.25, 1e-8);
  EXPECT_NEAR(cp.hessian_diagonal[1], -0.25, 1e-8);

  const auto as_solution = fm::to_solution(cp, s);
  EXPECT_EQ(as_solution.status, fm::Status::CriticalPointIsMaximum);
  EXPECT_NEAR(as_solution.objective, 6.0, 1e-8);

  // The critical point is worse than a vertex.
  const std::vector<double> vertex{2.0, 0.0};
  EXPECT_NEAR(fm::objective(vertex, s), 4.0 + std::sqrt(2.0), 1e-14);
  EXPECT_GT(as_solution.objective, fm::objective(vertex, s));
}

TEST(Transport, CriticalPointNeedsPositiveTransportCosts) {
  const auto s = scenario({record(1, 1, 1, 1, kInf), record(1, 1, 0, 1, kInf)}, 1.0);
  EXPECT_THROW(fm::transport_critical_point(s), fm::RegimeMismatch);
}

TEST(Transport, SymmetricBoundaryOptimum) {
  const auto s = symmetric_transport();
  const auto sol = fm::solve_transport_no_scarcity(s);
  EXPECT_EQ(sol.mix, (std::vector<double>{2.0, 0.0}));
  EXPECT_NEAR(sol.objective, 4.0 + std::sqrt(2.0), 1e-14);
  EXPECT_EQ(sol.status, fm::Status::BoundaryOptimum);

  fm::GridSpec g;
  g.points_per_axis = 2001;
  const auto grid = fm::grid_search(s, g);
  EXPECT_NEAR(grid.objective, 4.0 + std::sqrt(2.0), 1e-9);
  EXPECT_LE(sol.objective, grid.objective * (1 + 1e-12));
}

TEST(Transport, CheapFeedstockWins) {
  const auto s = scenario({record(1, 1, 0.1, 1, kInf), record(1, 10, 0.1, 1, kInf)}, 1.0, 0.5);
  const auto sol = fm::solve_transport_no_scarcity(s);
  EXPECT_EQ(sol.mix, (std::vector<double>{1.0, 0.0}));
  EXPECT_NEAR(sol.objective, 2.1, 1e-14);
  EXPECT_NEAR(fm::objective(std::vector<double>{0.0, 1.0}, s), 11.1, 1e-13);
  const auto grid = fm::grid_search(s);
  EXPECT_LE(sol.objective, grid.objective * (1 + 1e-12));
}

TEST(Transport, SingleFeedstock) {
  const auto s = scenario({record(4, 1, 2, 1, kInf)}, 2.0, 0.3);
  const auto sol = fm::solve_transport_no_scarcity(s);
  EXPECT_DOUBLE_EQ(sol.mix[0], 0.5);
}

TEST(Transport, ProductionStrictlyDecreasing) {
  fm::testing::Rng rng(47);
  for (int k = 0; k < 200; ++k) {
    const auto s = fm::testing::random_transport(rng, fm::testing::pick(rng, 1, 5));
    const double top = fm::xi_bar(s).value;
    const double xi = top + fm::testing::log_uniform(rng, 1e-3, 1e2);
    const double delta = fm::testing::log_uniform(rng, 1e-3, 1e2);
    EXPECT_LT(fm::transport_production(s, xi + delta), fm::transport_production(s, xi));
  }
}

TEST(Transport, CriticalPointPropertiesRandom) {
  fm::testing::Rng rng(53);
  for (int k = 0; k < 100; ++k) {
    const auto s = fm::testing::random_transport(rng, fm::testing::pick(rng, 1, 5));
    const auto cp = fm::transport_critical_point(s);
    EXPECT_GT(cp.xi, fm::xi_bar(s).value);
    EXPECT_LE(std::abs(cp.production - s.demand), 1e-10 * s.demand);
    for (double h : cp.hessian_diagonal) EXPECT_LT(h, 0.0);
    // Stationarity from the defining equation, checked coordinate by coordinate.
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& f = s.feedstocks[i];
      const double lhs = f.unit_cost +
                         s.transport_exponent * f.transport_cost * std::pow(cp.mix[i], s.transport_exponent - 1) +
                         f.footprint;
      EXPECT_LE(rel(lhs, cp.xi * f.conversion), 1e-9);
    }
  }
}

TEST(Transport, OptimumExcludesAFeedstock) {
  fm::testing::Rng rng(59);
  for (int k = 0; k < 100; ++k) {
    const auto s = fm::testing::random_transport(rng, fm::testing::pick(rng, 2, 4));
    const auto sol = fm::solve_transport_no_scarcity(s);
    EXPECT_TRUE(std::any_of(sol.mix.begin(), sol.mix.end(), [](double x) { return x == 0.0; }));
    EXPECT_TRUE(fm::is_feasible(sol.mix, s));
  }
}

TEST(Transport, EnumerationLimit) {
  fm::testing::Rng rng(61);
  const auto s = fm::testing::random_transport(rng, 13);
  EXPECT_THROW(fm::solve_transport_no_scarcity(s), fm::SupportEnumerationOverflow);
  fm::AnalyticConfig cfg;
  cfg.support_enum_limit = 14;
  EXPECT_NO_THROW(fm::solve_transport_no_scarcity(s, cfg));
}

TEST(Transport, MixedZeroTransportCosts) {
  // C = (1, 0): the free-transport record is linear, the other concave.
  const auto s = scenario({record(1, 1, 1, 1, kInf), record(1, 2.5, 0, 1, kInf)}, 2.0);
  const auto sol = fm::solve_transport_no_scarcity(s);
  const auto grid = fm::grid_search(s);
  EXPECT_LE(sol.objective, grid.objective * (1 + 1e-12));
  EXPECT_TRUE(fm::is_feasible(sol.mix, s));
}

TEST(Scarcity, SymmetricInteriorOptimum) {
  const auto s = symmetric_scarcity();
  const auto sol = fm::solve_scarcity_free_transport(s);
  EXPECT_EQ(sol.status, fm::Status::InteriorOptimum);
  EXPECT_EQ(sol.regime, fm::Regime::ScarcityFreeTransport);
  EXPECT_NEAR(sol.mix[0], 1.0, 1e-9);
  EXPECT_NEAR(sol.mix[1], 1.0, 1e-9);
  EXPECT_NEAR(*sol.xi, 1.0 + 100.0 / 81.0, 1e-9);

  const auto hess = fm::scarcity_hessian_diagonal(s, sol.mix);
  for (double h : hess) EXPECT_NEAR(h, 200.0 / 729.0, 1e-8);

  const auto kkt = fm::kkt_residual(sol.mix, s);
  EXPECT_LE(kkt.max_stationarity(), 1e-8);
  EXPECT_NEAR(kkt.xi_estimate, 1.0 + 100.0 / 81.0, 1e-8);
}

TEST(Scarcity, ProductionMatchesTextbookFormula) {
  fm::testing::Rng rng(67);
  for (int k = 0; k < 200; ++k) {
    const auto s = fm::testing::random_scarcity(rng, fm::testing::pick(rng, 1, 5));
    const double xi = fm::xi_bar(s).value * (1.0 + fm::testing::log_uniform(rng, 1e-3, 1e2));
    const double ours = fm::scarcity_production(s, xi);
    const double naive = fm::testing::naive_scarcity_production(s, xi);
    EXPECT_NEAR(ours, naive, 1e-9 * std::max(1.0, std::abs(naive)));
  }
}

TEST(Scarcity, ProductionIncreasingAndBounded) {
  fm::testing::Rng rng(71);
  for (int k = 0; k < 200; ++k) {
    const auto s = fm::testing::random_scarcity(rng, fm::testing::pick(rng, 1, 5));
    const double top = fm::xi_bar(s).value;
    const double xi = top + fm::testing::log_uniform(rng, 1e-3, 1e2);
    const double delta = fm::testing::log_uniform(rng, 1e-3, 1e2);
    const double a = fm::scarcity_production(s, xi);
    const double b = fm::scarcity_production(s, xi + delta);
    EXPECT_LT(a, b);
    EXPECT_LT(b, fm::reservoir_capacity(s));
    EXPECT_GE(fm::scarcity_production(s, top), 0.0);
  }
}

TEST(Scarcity, AllocationZeroAtOwnPotential) {
  const auto s = scenario({record(2, 1, 0, 3, 7.0), record(1, 0.5, 0, 1, 2.0)}, 1.0);
  EXPECT_EQ(fm::scarcity_allocation(s, 0, fm::productive_potential(s, 0)), 0.0);
  EXPECT_EQ(fm::scarcity_allocation(s, 1, fm::productive_potential(s, 1)), 0.0);
}

TEST(Compensation, SymmetricExample) {
  const auto report = fm::compensation_condition(symmetric_scarcity());
  EXPECT_EQ(report.max_index, 0u);
  ASSERT_EQ(report.terms.size(), 1u);
  EXPECT_EQ(report.terms[0].index, 1u);
  EXPECT_NEAR(report.terms[0].m, 0.8, 1e-15);
  EXPECT_NEAR(report.terms[0].lhs, 1.28, 1e-14);
  EXPECT_NEAR(report.terms[0].rhs, 1.64, 1e-14);
  EXPECT_TRUE(report.holds);
  EXPECT_EQ(report.p_at_xi_bar, 0.0);
}

TEST(Compensation, ClampedToZero) {
  // Q >= W lambda (N-1) / mu for every non-max record.
  const auto s = scenario({record(1, 3, 0, 1, 50.0), record(1, 1, 0, 1, 4.0), record(1, 1, 0, 2, 10.0)}, 40.0);
  const auto report = fm::compensation_condition(s);
  EXPECT_EQ(report.max_index, 0u);
  for (const auto& t : report.terms) {
    EXPECT_EQ(t.m, 0.0);
    EXPECT_EQ(t.lhs, 0.0);
    EXPECT_TRUE(t.holds);
  }
  EXPECT_TRUE(report.holds);
}

TEST(Compensation, ViolatedWithHeterogeneousPotentials) {
  // P = (4, 2): with M close to 1 the condition reduces to P_max < P_1.
  const auto s = scenario({record(1, 3, 0, 1, 10.0), record(1, 1, 0, 1, 1000.0)}, 2.0);
  const double m = 1.0 - 2.0 / 1000.0;
  const auto report = fm::compensation_condition(s);
  ASSERT_EQ(report.terms.size(), 1u);
  EXPECT_NEAR(report.terms[0].m, m, 1e-15);
  EXPECT_NEAR(report.terms[0].lhs, m * m * 4.0, 1e-13);
  EXPECT_NEAR(report.terms[0].rhs, m * m + 1.0, 1e-13);
  EXPECT_FALSE(report.holds);
}

TEST(Compensation, RejectsUnboundedOrSingle) {
  EXPECT_THROW(fm::compensation_condition(scenario({record(1, 1, 0, 1, 5.0)}, 1.0)), fm::RegimeMismatch);
  EXPECT_THROW(fm::compensation_condition(scenario({record(1, 1, 0, 1, 5.0), record(1, 1, 0, 1, kInf)}, 1.0)),
               fm::RegimeMismatch);
}

TEST(Compensation, ImpliesInteriorCondition) {
  fm::testing::Rng rng(73);
  int held = 0;
  for (int k = 0; k < 2000 && held < 200; ++k) {
    const auto s = fm::testing::random_scarcity(rng, fm::testing::pick(rng, 2, 5));
    const auto report = fm::compensation_condition(s);
    if (!report.holds) continue;
    ++held;
    EXPECT_LT(report.p_at_xi_bar, s.demand);
  }
  EXPECT_GE(held, 50);
}

TEST(Scarcity, AsymmetricFootprintsFallBackToBoundary) {
  // P = (1, 4). At xi_bar = 4 the first record alone already produces 50 > Q,
  // so the second record stays out.
  const auto s = scenario({record(1, 0, 0, 1, 100.0), record(1, 0, 0, 4, 100.0)}, 10.0);
  const auto report = fm::compensation_condition(s);
  EXPECT_NEAR(report.p_at_xi_bar, 50.0, 1e-12);
  EXPECT_GE(report.p_at_xi_bar, s.demand);

  const auto sol = fm::solve_scarcity_free_transport(s);
  EXPECT_EQ(sol.status, fm::Status::BoundaryOptimum);
  EXPECT_NEAR(sol.mix[0], 10.0, 1e-9);
  EXPECT_EQ(sol.mix[1], 0.0);
  EXPECT_NEAR(sol.objective, 1000.0 / 90.0, 1e-9);
  // Marginal cost of the idle record exceeds the multiplier.
  EXPECT_NEAR(*sol.xi, 10000.0 / 8100.0, 1e-9);
  EXPECT_GT(s.feedstocks[1].footprint, *sol.xi);

  // The interior equation has a root, but it would make x_2 negative.
  const auto root = fm::bisect_monotone(
      [](double xi) { return 100 * (1 - std::sqrt(1 / xi)) + 25 * (1 - 2 / std::sqrt(xi)); }, 1.0, 100.0, 10.0,
      1e-13, [](double) { return 1e-15; });
  EXPECT_NEAR(root.root, std::pow(150.0 / 115.0, 2), 1e-10);
  EXPECT_LT(25 * (1 - 2 / std::sqrt(root.root)), 0.0);

  fm::GridSpec g;
  g.points_per_axis = 10001;
  const auto grid = fm::grid_search(s, g);
  EXPECT_LE(rel(sol.objective, grid.objective), 1e-4);
  EXPECT_LE(sol.objective, grid.objective * (1 + 1e-12));
}

TEST(Scarcity, InteriorOptimumProperties) {
  fm::testing::Rng rng(79);
  int tested = 0;
  for (int k = 0; k < 1000 && tested < 60; ++k) {
    const auto s = fm::testing::random_scarcity(rng, fm::testing::pick(rng, 2, 4));
    if (!(fm::scarcity_production(s, fm::xi_bar(s).value) < s.demand)) continue;
    ++tested;
    const auto sol = fm::solve_scarcity_free_transport(s);
    EXPECT_EQ(sol.status, fm::Status::InteriorOptimum);
    EXPECT_TRUE(fm::is_feasible(sol.mix, s));
    for (double x : sol.mix) EXPECT_GT(x, 0.0);
    for (double h : fm::scarcity_hessian_diagonal(s, sol.mix)) EXPECT_GT(h, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& f = s.feedstocks[i];
      const double w = f.reservoir.volume();
      const double gap = w - f.footprint * sol.mix[i];
      const double lhs = f.unit_cost + f.footprint * w * w / (gap * gap);
      EXPECT_LE(rel(lhs, *sol.xi * f.conversion), 1e-8);
    }
  }
  EXPECT_GE(tested, 30);
}

TEST(Scarcity, StationaryNearReservoir) {
  // Both optima sit within 2% of their reservoir limits; marginal burdens are
  // in the hundreds of thousands.
  const auto s = scenario({record(2.1147652715769785, 5.0284616233353212, 0, 30.443862678456586,
                                  18.403585242101364),
                           record(3.3230163774891448, 0.081482807895274123, 0, 1.8200234707193441,
                                  0.40852761410692634)},
                          2.0084741283295218);
  const auto sol = fm::solve_scarcity_free_transport(s);
  ASSERT_EQ(sol.status, fm::Status::InteriorOptimum);
  const auto k = fm::kkt_residual(sol.mix, s);
  EXPECT_GT(k.xi_estimate, 1e5);
  EXPECT_LE(k.max_stationarity(), 1e-8);
  EXPECT_LE(k.primal, 1e-12 * s.demand);
}

TEST(Scarcity, GeneralSolverConvergesToUniqueOptimum) {
  fm::testing::Rng rng(83);
  fm::SolverConfig cfg;
  int tested = 0;
  for (int k = 0; k < 1000 && tested < 15; ++k) {
    const auto s = fm::testing::random_scarcity(rng, fm::testing::pick(rng, 2, 4));
    if (!(fm::scarcity_production(s, fm::xi_bar(s).value) < s.demand)) continue;
    ++tested;
    const auto exact = fm::solve_scarcity_free_transport(s);
    std::vector<std::size_t> all(s.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (int start = 0; start < 20; ++start) {
      const auto x0 = fm::testing::random_feasible_point(rng, s);
      const auto run = fm::projected_gradient_descent(s, all, x0, cfg);
      for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_LE(rel(run.mix[i], exact.mix[i]), 1e-6) << "scenario " << k << " start " << start << " i " << i;
      }
    }
  }
  EXPECT_GE(tested, 10);
}

TEST(Scarcity, UnboundedRecordPinsMultiplier) {
  // Second record has no reservoir limit, so xi cannot exceed its potential.
  const auto s = scenario({record(1, 1, 0, 1, 10.0), record(1, 2, 0, 1, kInf)}, 20.0);
  const auto sol = fm::solve_scarcity_free_transport(s);
  const auto grid = fm::grid_search(s);
  EXPECT_TRUE(fm::is_feasible(sol.mix, s));
  EXPECT_LE(sol.objective, grid.objective * (1 + 1e-9));
  EXPECT_NEAR(*sol.xi, 3.0, 1e-9);
}

TEST(Scarcity, InfeasibleThrows) {
  const auto s = scenario({record(1, 1, 0, 1, 10.0), record(1, 1, 0, 1, 10.0)}, 20.0);
  EXPECT_THROW(fm::solve_scarcity_free_transport(s), fm::InfeasibleScenario);
}

TEST(Dispatch, SolveAnalytic) {
  EXPECT_EQ(fm::solve_analytic(symmetric_scarcity()).regime, fm::Regime::ScarcityFreeTransport);
  EXPECT_EQ(fm::solve_analytic(symmetric_transport()).regime, fm::Regime::TransportNoScarcity);
  auto general = symmetric_scarcity();
  general.ces_exponent = 2.0;
  EXPECT_THROW(fm::solve_analytic(general), fm::RegimeMismatch);
}

TEST(Scaling, ObjectiveHomogeneousInCostsAndWater) {
  fm::testing::Rng rng(89);
  for (int k = 0; k < 100; ++k) {
    auto s = fm::testing::random_scenario(rng, fm::testing::pick(rng, 1, 4), 0.3);
    if (!fm::existence_condition(s)) continue;
    const auto x = fm::testing::random_feasible_point(rng, s);
    const double t = fm::testing::log_uniform(rng, 0.1, 10.0);
    const double before = fm::objective(x, s);
    for (auto& f : s.feedstocks) {
      f.unit_cost *= t;
      f.transport_cost *= t;
      f.footprint *= t;
      if (f.reservoir.is_bounded()) f.reservoir = fm::Reservoir::finite(f.reservoir.volume() * t);
    }
    EXPECT_LE(rel(fm::objective(x, s), t * before), 1e-12);
  }
}
