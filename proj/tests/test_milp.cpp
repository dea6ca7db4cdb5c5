#include <gtest/gtest.h>

#include <random>

#include "isrulog/branch_bound.hpp"
#include "isrulog/feasibility.hpp"
#include "oracles.hpp"

using namespace isrulog;

TEST(SolveMilp, SmallKnapsackMatchesEnumeration) {
  // max 5x + 4y s.t. 6x + 4y <= 24, x + 2y <= 6, x, y in {0..10}
  MilpModel m;
  auto x = m.add_variable("x", VarKind::integer, 0, 10, -5.0);
  auto y = m.add_variable("y", VarKind::integer, 0, 10, -4.0);
  m.add_constraint({{x, 6}, {y, 4}}, Sense::le, 24, "a");
  m.add_constraint({{x, 1}, {y, 2}}, Sense::le, 6, "b");
  double best = 0.0;
  for (int a = 0; a <= 10; ++a)
    for (int b = 0; b <= 10; ++b)
      if (6 * a + 4 * b <= 24 && a + 2 * b <= 6) best = std::min(best, -5.0 * a - 4.0 * b);
  for (auto br : {Branching::most_fractional, Branching::reliability}) {
    MilpOptions o;
    o.branching = br;
    auto s = solve_milp(m, o);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.objective, best, 1e-9);
    EXPECT_TRUE(check_feasibility(m, s.values).feasible());
  }
}

TEST(SolveMilp, ContinuousModelEqualsLp) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    auto m = oracle::random_lp(rng, 8, 6);
    auto a = solve_lp(m), b = solve_milp(m);
    ASSERT_EQ(a.status, b.status);
    if (a.status == SolveStatus::optimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-9 * std::max(1.0, std::abs(a.objective)));
      EXPECT_EQ(b.nodes, 1u);
    }
  }
}

TEST(SolveMilp, InfeasibleBinarySystem) {
  MilpModel m;
  auto x = m.add_variable("x", VarKind::binary, 0, 1, 1.0);
  auto y = m.add_variable("y", VarKind::binary, 0, 1, 1.0);
  m.add_constraint({{x, 1}, {y, 1}}, Sense::eq, 1, "one");
  m.add_constraint({{x, 1}, {y, -1}}, Sense::eq, 0, "same");
  auto s = solve_milp(m);
  EXPECT_EQ(s.status, SolveStatus::infeasible);
  EXPECT_FALSE(s.has_incumbent());
  EXPECT_EQ(exit_code(s.status), 2);
}

TEST(SolveMilp, UnboundedIntegerFreeDirection) {
  MilpModel m;
  auto x = m.add_variable("x", VarKind::integer, 0, 5, 1.0);
  auto y = m.add_variable("y", VarKind::continuous, 0, kInf, -1.0);
  m.add_constraint({{x, 1}, {y, -1}}, Sense::le, 2, "r");
  EXPECT_EQ(solve_milp(m).status, SolveStatus::unbounded);
}

TEST(SolveMilp, RandomInstancesMatchBruteForce) {
  std::mt19937_64 rng(77);
  int optimal = 0, infeasible = 0;
  for (int k = 0; k < 100; ++k) {
    auto m = oracle::random_milp(rng);
    auto ref = oracle::brute_force_milp(m);
    auto s = solve_milp(m);
    if (ref.status == oracle::DenseResult::infeasible) {
      EXPECT_EQ(s.status, SolveStatus::infeasible) << k;
      ++infeasible;
      continue;
    }
    ASSERT_EQ(s.status, SolveStatus::optimal) << k;
    EXPECT_LE(std::abs(s.objective - ref.objective), 1e-6 * std::max(1.0, std::abs(ref.objective))) << k;
    EXPECT_TRUE(check_feasibility(m, s.values).feasible()) << k;
    ++optimal;
  }
  EXPECT_GT(optimal, 50);
  EXPECT_GT(infeasible, 0);
}

TEST(SolveMilp, IncumbentHistoryMonotoneAndBoundBelow) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 40; ++k) {
    auto m = oracle::random_milp(rng);
    for (auto br : {Branching::most_fractional, Branching::reliability}) {
      MilpOptions o;
      o.branching = br;
      auto s = solve_milp(m, o);
      if (!s.has_incumbent()) continue;
      for (std::size_t i = 1; i < s.incumbent_history.size(); ++i) {
        EXPECT_LE(s.incumbent_history[i].second, s.incumbent_history[i - 1].second);
        EXPECT_GE(s.incumbent_history[i].first, s.incumbent_history[i - 1].first);
      }
      EXPECT_LE(s.bound, s.objective + 1e-9 * std::max(1.0, std::abs(s.objective)));
    }
  }
}

TEST(SolveMilp, ObjectiveScalesLinearly) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 30; ++k) {
    auto m = oracle::random_milp(rng);
    auto base = solve_milp(m);
    if (base.status != SolveStatus::optimal) continue;
    for (double lam : {0.5, 3.0, 1000.0}) {
      MilpModel s = m;
      for (std::size_t j = 0; j < m.num_variables(); ++j) s.set_objective(j, m.objective()[j] * lam);
      auto r = solve_milp(s);
      ASSERT_EQ(r.status, SolveStatus::optimal);
      EXPECT_NEAR(r.objective, lam * base.objective, 1e-6 * std::max(1.0, std::abs(lam * base.objective)));
    }
  }
}

TEST(SolveMilp, NodeLimitKeepsIncumbentStatus) {
  std::mt19937_64 rng(5);
  MilpModel m;
  std::vector<Term> w;
  std::uniform_int_distribution<int> u(5, 40);
  for (int j = 0; j < 30; ++j) {
    auto v = m.add_variable("b" + std::to_string(j), VarKind::binary, 0, 1, -u(rng));
    w.push_back({v, static_cast<double>(u(rng))});
  }
  m.add_constraint(w, Sense::le, 200.5, "cap");
  MilpOptions o;
  o.node_limit = 3;
  o.rounding = false;
  auto s = solve_milp(m, o);
  EXPECT_TRUE(s.status == SolveStatus::node_limit || s.status == SolveStatus::optimal);
  if (s.status == SolveStatus::node_limit) {
    EXPECT_EQ(exit_code(s.status), 3);
  }
}

TEST(SolveMilp, InitialSolutionIsAccepted) {
  MilpModel m;
  auto x = m.add_variable("x", VarKind::integer, 0, 9, -1.0);
  m.add_constraint({{x, 2}}, Sense::le, 9, "r");
  MilpOptions o;
  o.initial_solution = {3.0};
  auto s = solve_milp(m, o);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_DOUBLE_EQ(s.values[x], 4.0);
  ASSERT_FALSE(s.incumbent_history.empty());
  EXPECT_DOUBLE_EQ(s.incumbent_history.front().second, -3.0);
}
