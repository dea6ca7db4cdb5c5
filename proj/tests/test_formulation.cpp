#include <gtest/gtest.h>

#include <random>

#include "isrulog/isrulog.hpp"

using namespace isrulog;

namespace {

BuildOptions natural_units() { return BuildOptions{}; }

ScenarioConfig two_year(Variant v) {
  auto c = builtin_cislunar_case(v, false);
  c.options.mission_years = 2;
  c.name += "_2y";
  return c;
}

double coef(const MilpModel& m, const std::string& row, const std::string& var) {
  auto r = m.find_constraint(row);
  if (!r) throw std::runtime_error("no row " + row);
  auto v = m.var_index(var);
  for (const auto& t : m.constraint(*r).terms)
    if (t.var == v) return t.coef;
  return 0.0;
}

/// build_logistics_model with every manufacturing big-M multiplied by `factor`.
LogisticsModel build_with_loose_m(const ScenarioConfig& config, double factor) {
  LogisticsModel lm;
  lm.config = config;
  lm.units = BuildOptions::from(config);
  lm.milp.set_name(config.name);
  lm.net = build_time_expanded_graph(config.nodes, config.arcs, config.horizon(), 1);
  lm.initial_plant_cost = initial_plant_cost(config);
  add_flow_variables(lm);
  add_processing(lm);
  auto reach = earliest_arrival(lm.net);
  for (const auto& s : config.structures) {
    auto sizing = s.sizing.materialize(config.options.max_plant_mass);
    auto cost = s.cost.materialize(config.options.max_plant_mass);
    for (const auto& node : s.locations)
      for (int te = reach.at(node); te < lm.net.horizon; ++te) {
        DeploymentCandidate d{s.id, s.kind, node, te, sizing, cost, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, {}, {}};
        d.Y = lm.milp.add_variable("Y[" + d.tag() + "]", VarKind::binary, 0.0, 1.0);
        d.F = lm.milp.add_variable("F[" + d.tag() + "]", VarKind::continuous, 0.0, config.options.max_plant_mass / lm.units.mass_unit_kg);
        encode_pwl_sizing(lm, d);
        encode_pwl_cost(lm, d);
        add_manufacturing(lm, d, factor * eval(cost, config.options.max_plant_mass) / lm.units.cost_unit_usd);
        add_facility_deployment(lm, d);
        lm.candidates.push_back(std::move(d));
      }
  }
  add_spacecraft_supply(lm);
  add_concurrency(lm);
  add_mass_balance(lm);
  assemble_objective(lm);
  return lm;
}

}  // namespace

TEST(Formulation, FlowVariablesMatchSlotEnumeration) {
  auto c = builtin_cislunar_case(Variant::concentrated, false);
  auto lm = build_logistics_model(c);
  std::size_t slots = 0, xs = 0, ints = 0;
  const int H = c.horizon();
  for (const auto& a : c.arcs)
    for (int t = 0; t + a.tof <= H; ++t) ++slots;
  slots += c.nodes.size() * static_cast<std::size_t>(H);
  for (const auto& v : lm.milp.variables())
    if (v.label.rfind("x[", 0) == 0) {
      ++xs;
      bool sc = v.label.find(",spacecraft]") != std::string::npos;
      bool hold = v.label[2] == v.label[v.label.find('>') + 1] && v.label.substr(2, v.label.find('>') - 2) ==
                                                                         v.label.substr(v.label.find('>') + 1, v.label.find(',') - v.label.find('>') - 1);
      if (v.kind == VarKind::integer) {
        ++ints;
        EXPECT_TRUE(sc && !hold) << v.label;
      } else {
        EXPECT_TRUE(!sc || hold) << v.label;
      }
    }
  EXPECT_EQ(xs, slots * c.commodities.size());
  EXPECT_EQ(lm.flows.size(), slots);
  EXPECT_EQ(ints, slots - c.nodes.size() * static_cast<std::size_t>(H));
}

TEST(Formulation, DemandRightHandSides) {
  auto lm = build_logistics_model(builtin_cislunar_case(Variant::concentrated, false), natural_units());
  auto r = lm.milp.find_constraint("bal[GEO,2,payload]");
  ASSERT_TRUE(r);
  EXPECT_DOUBLE_EQ(lm.milp.constraint(*r).rhs, -25000.0);
  EXPECT_DOUBLE_EQ(lm.milp.constraint(*lm.milp.find_constraint("bal[EML1,6,oxygen]")).rhs, -5000.0);
  EXPECT_FALSE(lm.milp.find_constraint("bal[GEO,3,payload]") && lm.milp.constraint(*lm.milp.find_constraint("bal[GEO,3,payload]")).rhs != 0.0);
  // Scaled build: the same row in tonnes.
  auto scaled = build_logistics_model(builtin_cislunar_case(Variant::concentrated, false));
  EXPECT_DOUBLE_EQ(scaled.milp.constraint(*scaled.milp.find_constraint("bal[GEO,2,payload]")).rhs, -25.0);
}

TEST(Formulation, BurnEntersDestinationBalance) {
  auto c = builtin_cislunar_case(Variant::concentrated, false);
  auto lm = build_logistics_model(c, natural_units());
  // Oxygen leaving LEO toward EML1 at step 0 arrives at step 1 with the burn removed.
  double phi = burn_fraction(3770.0, 420.0);
  EXPECT_NEAR(coef(lm.milp, "bal[EML1,1,oxygen]", "x[LEO>EML1,0,oxygen]"), -(1.0 - phi * 5.5 / 6.5), 1e-12);
  EXPECT_NEAR(coef(lm.milp, "bal[EML1,1,oxygen]", "x[LEO>EML1,0,payload]"), phi * 5.5 / 6.5, 1e-12);
  EXPECT_NEAR(coef(lm.milp, "bal[EML1,1,hydrogen]", "x[LEO>EML1,0,spacecraft]"), phi / 6.5 * 6000.0, 1e-9);
  EXPECT_DOUBLE_EQ(coef(lm.milp, "bal[LEO,0,payload]", "x[LEO>EML1,0,payload]"), 1.0);
  // Launch arcs carry no burn.
  EXPECT_DOUBLE_EQ(coef(lm.milp, "bal[LEO,0,oxygen]", "x[Earth>LEO,0,payload]"), 0.0);
  EXPECT_DOUBLE_EQ(coef(lm.milp, "bal[LEO,0,payload]", "x[Earth>LEO,0,payload]"), -1.0);
}

TEST(Formulation, PwlEncodingSelectsUpperInclusiveInterval) {
  auto f = from_scaling_rule({10000.0, 3000, 0.10, ScalingDirection::discount, FlatHead{1000, 10e6}}, 15000);
  for (double F : {1.0, 500.0, 1000.0, 1000.5, 3000.0, 4000.0, 6000.0, 14999.0, 15000.0}) {
    MilpModel m;
    auto in = m.add_variable("F", VarKind::continuous, F, F);
    auto e = encode_pwl(m, f, "t", in, "g", "q", "J");
    // Preferring the lowest index resolves the tie at a shared breakpoint.
    for (std::size_t r = 0; r < e.binaries.size(); ++r) m.set_objective(e.binaries[r], static_cast<double>(r + 1));
    auto s = solve_milp(m);
    ASSERT_EQ(s.status, SolveStatus::optimal) << F;
    EXPECT_NEAR(s.values[e.output], eval(f, F), 1e-6 * eval(f, F)) << F;
    auto want = interval_of(f, F);
    ASSERT_TRUE(want);
    for (std::size_t r = 0; r < e.binaries.size(); ++r) EXPECT_NEAR(s.values[e.binaries[r]], r == *want ? 1.0 : 0.0, 1e-9) << F;
  }
}

TEST(Formulation, PwlEncodingSurvivesNegligibleCoefficient) {
  // A head curve whose second intercept is rounding noise rather than zero.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> base(0.5, 100.0), width(10.0, 5000.0), u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    double b = base(rng), w = width(rng);
    auto f = from_scaling_rule(b, w, 0.25, ScalingDirection::discount, 9, FlatHead{w * 0.3, b * w * 0.3});
    f.intercepts[1] = -1e-16 * f.intercepts[0];
    double q = std::max(1e-3, u(rng) * f.domain_max());
    MilpModel m;
    auto in = m.add_variable("F", VarKind::continuous, q, q);
    auto e = encode_pwl(m, f, "t", in, "g", "q", "J");
    for (std::size_t r = 0; r < e.binaries.size(); ++r) m.set_objective(e.binaries[r], static_cast<double>(r + 1));
    auto s = solve_milp(m);
    ASSERT_EQ(s.status, SolveStatus::optimal) << k << " q=" << q;
    EXPECT_NEAR(s.values[e.output], eval(f, q), 1e-6 * eval(f, q)) << k;
  }
}

TEST(Formulation, PwlEncodingCostExamples) {
  auto f = from_scaling_rule({10000.0, 3000, 0.10, ScalingDirection::discount, FlatHead{1000, 10e6}}, 15000);
  for (auto [F, J] : {std::pair{4000.0, 39e6}, std::pair{500.0, 10e6}}) {
    MilpModel m;
    auto in = m.add_variable("F", VarKind::continuous, F, F);
    auto e = encode_pwl(m, f, "t", in, "h", "Fg", "J");
    m.set_objective(e.output, 1.0);
    auto s = solve_milp(m);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.objective, J, 1e-3);
  }
  // Same curve in tonnes and $M.
  MilpModel m;
  auto in = m.add_variable("F", VarKind::continuous, 4.0, 4.0);
  auto e = encode_pwl(m, f, "t", in, "h", "Fg", "J", 1000.0, 1e6);
  m.set_objective(e.output, 1.0);
  EXPECT_NEAR(solve_milp(m).objective, 39.0, 1e-9);
}

TEST(Formulation, BinaryProductExact) {
  for (double y : {0.0, 1.0})
    for (double v : {0.0, 2.5, 7.0}) {
      MilpModel m;
      auto Y = m.add_variable("Y", VarKind::binary, y, y);
      auto V = m.add_variable("V", VarKind::continuous, v, v);
      auto w = add_binary_product(m, Y, V, 7.0, "w", "k", false);
      for (double dir : {1.0, -1.0}) {
        m.set_objective(w, dir);
        auto s = solve_milp(m);
        ASSERT_EQ(s.status, SolveStatus::optimal);
        EXPECT_NEAR(s.values[w], y * v, 1e-9);
      }
    }
}

TEST(Formulation, BigMBelowCostBoundRejected) {
  auto lm = build_logistics_model(builtin_cislunar_case(Variant::concentrated, false));
  auto d = lm.candidates.front();
  double bound = eval(d.cost, 15000.0) / 1e6;
  EXPECT_THROW(add_manufacturing(lm, d, bound * 0.5), ValidationError);
  d.structure += "_copy";
  EXPECT_NO_THROW(add_manufacturing(lm, d, bound));
}

TEST(Formulation, DeploymentRowsAtLocatedNode) {
  auto c = builtin_cislunar_case(Variant::distributed, false);
  auto lm = build_logistics_model(c, natural_units());
  bool eml1 = false;
  for (const auto& d : lm.candidates) {
    auto X = lm.milp.variable(d.X).label;
    EXPECT_DOUBLE_EQ(coef(lm.milp, "bal[" + d.node + "," + std::to_string(d.step) + ",plant]", X), 1.0);
    for (const auto& n : c.nodes)
      if (n.id != d.node && lm.milp.find_constraint("bal[" + n.id + "," + std::to_string(d.step) + ",plant]")) {
        EXPECT_EQ(coef(lm.milp, "bal[" + n.id + "," + std::to_string(d.step) + ",plant]", X), 0.0);
      }
    for (int t = d.step + 1; t <= c.horizon(); ++t) {
      double want = (t - d.step) % 2 == 0 ? 0.05 : 0.0;
      auto row = "bal[" + d.node + "," + std::to_string(t) + ",spares]";
      EXPECT_DOUBLE_EQ(lm.milp.find_constraint(row) ? coef(lm.milp, row, X) : 0.0, want) << X << " " << t;
    }
    eml1 |= d.node == "EML1";
    EXPECT_EQ(d.node == "EML1" ? d.kind : IsruKind::DWE, IsruKind::DWE);
  }
  EXPECT_TRUE(eml1);
  // Concentrated never places anything at EML1.
  for (const auto& d : build_logistics_model(builtin_cislunar_case(Variant::concentrated, false)).candidates) EXPECT_EQ(d.node, "Moon");
}

TEST(Formulation, CandidateStepsFollowReach) {
  auto c = builtin_cislunar_case(Variant::distributed, true);
  auto lm = build_logistics_model(c);
  std::map<std::string, std::set<int>> steps;
  for (const auto& d : lm.candidates) steps[d.structure + "@" + d.node].insert(d.step);
  EXPECT_EQ(steps["SWE@Moon"], (std::set<int>{2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(steps["DWE@EML1"], (std::set<int>{1, 2, 3, 4, 5, 6, 7}));
}

TEST(Formulation, SpacecraftSupplyRows) {
  auto c = builtin_cislunar_case(Variant::concentrated, false);
  auto lm = build_logistics_model(c, natural_units());
  EXPECT_EQ(lm.spacecraft.size(), static_cast<std::size_t>(c.horizon() * c.vehicle.available_per_window));
  for (const auto& s : lm.spacecraft) {
    auto y = lm.milp.variable(s.Y).label;
    EXPECT_DOUBLE_EQ(coef(lm.milp, "bal[Earth," + std::to_string(s.step) + ",spacecraft]", y), -1.0);
    std::string tag = std::to_string(s.step) + "," + std::to_string(s.index);
    EXPECT_DOUBLE_EQ(coef(lm.milp, "zsc_ge[" + tag + "]", y), -150e6);
    EXPECT_DOUBLE_EQ(lm.milp.objective()[s.z], 1.0);
    if (s.index > 1) {
      EXPECT_TRUE(lm.milp.find_constraint("Ysc_order[" + tag + "]"));
    }
  }
}

TEST(Formulation, TransportationCostCoefficients) {
  auto lm = build_logistics_model(builtin_cislunar_case(Variant::concentrated, false), natural_units());
  const auto& m = lm.milp;
  // 1000 kg of payload launched costs $5M.
  EXPECT_DOUBLE_EQ(1000.0 * m.objective()[m.var_index("x[Earth>LEO,0,payload]")], 5e6);
  EXPECT_DOUBLE_EQ(m.objective()[m.var_index("x[Earth>LEO,0,oxygen]")], 5000.15);
  EXPECT_DOUBLE_EQ(m.objective()[m.var_index("x[Earth>LEO,0,spacecraft]")], 30e6);
  EXPECT_DOUBLE_EQ(m.objective()[m.var_index("x[LEO>GEO,1,spacecraft]")], 0.5e6);
  EXPECT_DOUBLE_EQ(m.objective()[m.var_index("x[LEO>GEO,1,payload]")], 0.0);
  EXPECT_DOUBLE_EQ(m.objective()[m.var_index("x[LEO>LEO,1,spacecraft]")], 0.0);
  // Pre-placed 1000 kg plant: $10M manufacturing plus $5M launch.
  EXPECT_DOUBLE_EQ(m.objective_constant(), 15e6);
}

TEST(Formulation, DeterministicAssembly) {
  auto c = builtin_cislunar_case(Variant::distributed, true);
  auto a = build_logistics_model(c), b = build_logistics_model(c);
  EXPECT_EQ(a.milp.dump(), b.milp.dump());
  EXPECT_EQ(export_mps(a.milp), export_mps(b.milp));
}

TEST(Formulation, VariableFamiliesComplete) {
  auto lm = build_logistics_model(builtin_cislunar_case(Variant::distributed, false));
  auto f = variable_families(lm.milp);
  for (const char* fam : {"x", "w", "Y", "F", "g", "q", "N", "h", "Fg", "J", "z", "X", "P", "Ysc", "zsc"})
    EXPECT_NE(std::find(f.begin(), f.end(), fam), f.end()) << fam;
  EXPECT_EQ(f.size(), 15u);
}

TEST(Formulation, ModelSizes) {
  std::vector<std::tuple<Variant, bool, std::size_t>> cases{{Variant::concentrated, false, 8},
                                                            {Variant::concentrated, true, 12},
                                                            {Variant::distributed, false, 13},
                                                            {Variant::distributed, true, 19}};
  for (auto [v, s, cands] : cases) {
    auto lm = build_logistics_model(builtin_cislunar_case(v, s));
    EXPECT_EQ(lm.candidates.size(), cands);
    EXPECT_LT(lm.milp.num_variables(), 2000u);
  }
}

TEST(Formulation, RelaxingWindowsNeverRaisesTheBound) {
  auto c = two_year(Variant::concentrated);
  for (auto& a : c.arcs)
    if (a.kind == ArcKind::transport && (a.origin == "GEO" || a.dest == "GEO")) a.windows = {0, 1, 3};
  BuildOptions with = BuildOptions::from(c), without = with;
  without.time_windows = false;
  auto a = solve_lp(build_logistics_model(c, with).milp), b = solve_lp(build_logistics_model(c, without).milp);
  ASSERT_EQ(a.status, SolveStatus::optimal);
  ASSERT_EQ(b.status, SolveStatus::optimal);
  EXPECT_LE(b.objective, a.objective + 1e-9 * std::abs(a.objective));
}

TEST(Formulation, TighteningRaisesRootBoundOnly) {
  auto c = two_year(Variant::distributed);
  BuildOptions tight = BuildOptions::from(c), loose = tight;
  loose.tightening = false;
  auto lt = build_logistics_model(c, tight), ll = build_logistics_model(c, loose);
  auto rt = solve_lp(lt.milp), rl = solve_lp(ll.milp);
  EXPECT_GE(rt.objective, rl.objective - 1e-9 * std::abs(rl.objective));
  auto st = solve_milp(lt.milp), sl = solve_milp(ll.milp);
  ASSERT_EQ(st.status, SolveStatus::optimal);
  ASSERT_EQ(sl.status, SolveStatus::optimal);
  EXPECT_NEAR(st.objective, sl.objective, 1e-5 * std::abs(st.objective));
}

TEST(Formulation, LooserBigMSameOptimum) {
  auto c = two_year(Variant::concentrated);
  auto exact = build_logistics_model(c);
  auto loose = build_with_loose_m(c, 10.0);
  EXPECT_EQ(exact.milp.num_variables(), loose.milp.num_variables());
  auto a = solve_milp(exact.milp), b = solve_milp(loose.milp);
  ASSERT_EQ(a.status, SolveStatus::optimal);
  ASSERT_EQ(b.status, SolveStatus::optimal);
  EXPECT_NEAR(a.objective, b.objective, 1e-5 * std::abs(a.objective));
}

TEST(Formulation, DemandBeforeArrivalIsInfeasible) {
  auto c = builtin_cislunar_case(Variant::concentrated, false);
  c.options.mission_years = 1;
  c.options.steps_per_year = 1;
  // The Moon is two steps out; a demand there at step 1 cannot be met.
  auto lm = build_logistics_model(c);
  EXPECT_TRUE(lm.candidates.empty());
  auto s = solve_milp(lm.milp);
  EXPECT_EQ(s.status, SolveStatus::infeasible);
  EXPECT_EQ(exit_code(s.status), 2);
}
