#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "lp_model.hpp"
#include "network.hpp"
#include "pwl.hpp"
#include "scenario.hpp"

namespace isrulog {

/// Units of the assembled model. Masses are divided by mass_unit_kg, costs by cost_unit_usd;
/// discrete counts stay counts.
struct BuildOptions {
  double mass_unit_kg = 1.0;
  double cost_unit_usd = 1.0;
  /// Adds z >= J, X >= F, P >= N and turns the activation links into equalities.
  bool tightening = true;
  /// When false every arc is treated as always open.
  bool time_windows = true;

  static BuildOptions from(const ScenarioConfig& c) {
    BuildOptions b;
    b.mass_unit_kg = c.options.mass_unit_kg;
    b.cost_unit_usd = c.options.cost_unit_usd;
    return b;
  }
};

/// Binaries, segment variables and output variable of one PWL encoding.
struct PwlEncoding {
  std::vector<std::size_t> binaries;
  std::vector<std::size_t> segments;
  std::size_t input;
  std::size_t output;
};

/// Interval encoding of y = f(input): sum b <= 1, lo_r b_r <= s_r <= hi_r b_r, input = sum s_r,
/// output = sum (slope_r s_r + intercept_r b_r). Quantities are divided by in_unit / out_unit.
inline PwlEncoding encode_pwl(MilpModel& m, const PiecewiseLinear& f, const std::string& tag, std::size_t input,
                              const std::string& bin_name, const std::string& seg_name, const std::string& out_name,
                              double in_unit = 1.0, double out_unit = 1.0) {
  validate_pwl(f, f.slopes.size() > 1 && f.slopes[f.flat_head ? 1 : 0] > f.slopes.back() ? Curvature::concave : Curvature::convex);
  PwlEncoding e;
  e.input = input;
  std::vector<Term> in_terms{{input, -1.0}}, out_terms, sum_terms;
  for (std::size_t r = 0; r < f.intervals(); ++r) {
    std::string k = tag + "," + std::to_string(r + 1);
    auto b = m.add_variable(bin_name + "[" + k + "]", VarKind::binary, 0.0, 1.0);
    auto s = m.add_variable(seg_name + "[" + k + "]", VarKind::continuous, 0.0, kInf);
    e.binaries.push_back(b);
    e.segments.push_back(s);
    m.add_constraint({{s, 1.0}, {b, -f.upper(r) / in_unit}}, Sense::le, 0.0, seg_name + "_hi[" + k + "]");
    m.add_constraint({{s, 1.0}, {b, -f.lower(r) / in_unit}}, Sense::ge, 0.0, seg_name + "_lo[" + k + "]");
    in_terms.push_back({s, 1.0});
    out_terms.push_back({s, f.slopes[r] * in_unit / out_unit});
    out_terms.push_back({b, f.intercepts[r] / out_unit});
    sum_terms.push_back({b, 1.0});
  }
  m.add_constraint(sum_terms, Sense::le, 1.0, bin_name + "_one[" + tag + "]");
  m.add_constraint(in_terms, Sense::eq, 0.0, seg_name + "_sum[" + tag + "]");
  e.output = m.add_variable(out_name + "[" + tag + "]", VarKind::continuous, 0.0, kInf);
  out_terms.push_back({e.output, -1.0});
  m.add_constraint(out_terms, Sense::eq, 0.0, out_name + "_def[" + tag + "]");
  return e;
}

/// w = Y * v for binary Y and 0 <= v <= big_m: w <= M Y, w <= v, w >= v - (1 - Y) M, w >= 0.
inline std::size_t add_binary_product(MilpModel& m, std::size_t y, std::size_t v, double big_m, const std::string& name,
                                      const std::string& tag, bool tighten, double obj = 0.0) {
  auto w = m.add_variable(name + "[" + tag + "]", VarKind::continuous, 0.0, kInf, obj);
  m.add_constraint({{w, 1.0}, {y, -big_m}}, Sense::le, 0.0, name + "_my[" + tag + "]");
  m.add_constraint({{w, 1.0}, {v, -1.0}}, Sense::le, 0.0, name + "_le[" + tag + "]");
  m.add_constraint({{w, 1.0}, {v, -1.0}, {y, -big_m}}, Sense::ge, -big_m, name + "_ge[" + tag + "]");
  if (tighten) m.add_constraint({{w, 1.0}, {v, -1.0}}, Sense::ge, 0.0, name + "_tight[" + tag + "]");
  return w;
}

struct FlowSlotVars {
  Slot slot;
  /// One variable per commodity in global order.
  std::vector<std::size_t> x;
};

struct ProcessSlot {
  std::string structure;
  IsruKind kind;
  std::string node;
  int t;
  std::size_t w;
  /// Per-step processing capacity of the pre-placed plant (model units).
  double initial_rate = 0.0;
  std::vector<std::pair<std::size_t, double>> capacity_terms;
};

struct DeploymentCandidate {
  std::string structure;
  IsruKind kind;
  std::string node;
  int step;
  PiecewiseLinear sizing;
  PiecewiseLinear cost;
  double big_m_cost;
  double big_m_mass;
  double big_m_rate;
  std::size_t Y, F, N, J, z, X, P;
  PwlEncoding sizing_enc;
  PwlEncoding cost_enc;

  std::string tag() const { return structure + "@" + node + "," + std::to_string(step); }
};

struct SpacecraftCandidate {
  int step;
  int index;
  std::size_t Y;
  std::size_t z;
};

using BalanceKey = std::tuple<std::string, int, std::string>;

/// The assembled MILP together with the maps from model variables back to plan entities.
struct LogisticsModel {
  ScenarioConfig config;
  BuildOptions units;
  TimeExpandedNetwork net;
  MilpModel milp;
  std::vector<FlowSlotVars> flows;
  std::vector<ProcessSlot> processes;
  std::vector<DeploymentCandidate> candidates;
  std::vector<SpacecraftCandidate> spacecraft;
  std::map<BalanceKey, std::size_t> balance_rows;
  /// Manufacturing plus launch of the pre-placed plant ($).
  double initial_plant_cost = 0.0;
  std::map<BalanceKey, std::vector<Term>> pending;
  std::map<BalanceKey, double> rhs;

  /// Natural units (kg or count) per model unit of commodity k.
  double commodity_scale(std::size_t k) const {
    const auto& c = config.commodities[k];
    return c.cls == CommodityClass::continuous ? units.mass_unit_kg : 1.0;
  }
  double mass_per_model_unit(std::size_t k) const { return config.commodities[k].unit_mass * commodity_scale(k); }
  std::size_t commodity(const std::string& id) const { return commodity_index(config.commodities, id); }
  const ArcSpec& arc(const FlowSlotVars& f) const { return net.arcs[f.slot.arc]; }
  void add_balance(const std::string& node, int t, const std::string& c, std::size_t var, double coef) {
    pending[{node, t, c}].push_back({var, coef});
  }
  double step_years() const { return config.step_years(); }
};

inline std::string arc_name(const ArcSpec& a) { return a.origin + ">" + a.dest; }

/// Transport, launch and holdover flow variables; discrete commodities are integer on vehicle slots.
/// Holdover counts are continuous; integral transport flows make them integral after flooring.
inline void add_flow_variables(LogisticsModel& lm) {
  const auto& cs = lm.config.commodities;
  double count_ub = static_cast<double>(lm.config.vehicle.available_per_window) * lm.net.horizon;
  for (const auto& s : lm.net.slots) {
    const auto& a = lm.net.arcs[s.arc];
    FlowSlotVars f{s, {}};
    std::string base = arc_name(a) + "," + std::to_string(s.t) + (lm.net.vehicle_count > 1 && s.vehicle >= 0 ? ",v" + std::to_string(s.vehicle) : "");
    for (std::size_t k = 0; k < cs.size(); ++k) {
      bool discrete = cs[k].cls == CommodityClass::discrete;
      VarKind kind = discrete && a.kind != ArcKind::holdover ? VarKind::integer : VarKind::continuous;
      f.x.push_back(lm.milp.add_variable("x[" + base + "," + cs[k].id + "]", kind, 0.0, discrete ? count_ub : kInf));
    }
    auto Q = burn_transformation(a.kind == ArcKind::transport ? a.delta_v : 0.0, lm.config.vehicle.isp, cs);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      lm.add_balance(a.origin, s.t, cs[k].id, f.x[k], 1.0);
      for (std::size_t c = 0; c < cs.size(); ++c) {
        double q = Q(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k));
        if (q != 0.0) lm.add_balance(a.dest, s.t + a.tof, cs[c].id, f.x[k], -q * lm.commodity_scale(k) / lm.commodity_scale(c));
      }
    }
    if (a.kind == ArcKind::transport && burn_fraction(a.delta_v, lm.config.vehicle.isp) > 0.0) {
      CommodityRoles roles;
      for (const auto& pid : {roles.oxygen, roles.hydrogen}) {
        auto c = lm.commodity(pid);
        std::vector<Term> terms;
        for (std::size_t k = 0; k < cs.size(); ++k) {
          double q = Q(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k));
          if (q != 0.0) terms.push_back({f.x[k], q * lm.commodity_scale(k) / lm.commodity_scale(c)});
        }
        lm.milp.add_constraint(terms, Sense::ge, 0.0, "burn[" + base + "," + pid + "]");
      }
    }
    lm.flows.push_back(std::move(f));
  }
}

/// ISRU process slots for every (structure, node) that can hold a plant: consume at t, produce at t+1.
inline void add_processing(LogisticsModel& lm) {
  const auto& cs = lm.config.commodities;
  const double dt = lm.step_years();
  std::set<std::pair<std::string, std::string>> sites;
  for (const auto& s : lm.config.structures)
    for (const auto& l : s.locations) sites.insert({s.id, l});
  for (const auto& p : lm.config.options.initial_plant) sites.insert({p.structure, p.node});
  const auto n = static_cast<Eigen::Index>(cs.size());
  CommodityRoles roles;
  for (const auto& s : lm.config.structures) {
    std::vector<std::string> nodes;
    for (const auto& [sid, node] : sites)
      if (sid == s.id) nodes.push_back(node);
    std::sort(nodes.begin(), nodes.end(), [&](const std::string& a, const std::string& b) {
      return lm.net.node_index(a) < lm.net.node_index(b);
    });
    auto sizing = s.sizing.materialize(lm.config.options.max_plant_mass);
    for (const auto& node : nodes) {
      bool regolith = lm.net.node(node).body_kind == BodyKind::surface;
      auto Q = isru_transformation(s.kind, cs, regolith, roles);
      Eigen::Index in = s.kind == IsruKind::SWE ? n : static_cast<Eigen::Index>(lm.commodity(roles.water));
      double init_mass = 0.0;
      for (const auto& p : lm.config.options.initial_plant)
        if (p.structure == s.id && p.node == node) init_mass += p.mass;
      double init_rate = init_mass > 0.0 ? eval(sizing, init_mass) * dt / lm.units.mass_unit_kg : 0.0;
      for (int t = 0; t < lm.net.horizon; ++t) {
        ProcessSlot p{s.id, s.kind, node, t, 0, init_rate, {}};
        p.w = lm.milp.add_variable("w[" + s.id + "@" + node + "," + std::to_string(t) + "]", VarKind::continuous, 0.0, kInf);
        if (in < n) lm.add_balance(node, t, cs[static_cast<std::size_t>(in)].id, p.w, 1.0);
        for (Eigen::Index c = 0; c < n; ++c)
          if (Q(c, in) != 0.0) lm.add_balance(node, t + 1, cs[static_cast<std::size_t>(c)].id, p.w, -Q(c, in));
        lm.processes.push_back(std::move(p));
      }
    }
  }
}

inline void encode_pwl_sizing(LogisticsModel& lm, DeploymentCandidate& d) {
  const auto tag = d.tag();
  d.sizing_enc = encode_pwl(lm.milp, d.sizing, tag, d.F, "g", "q", "N", lm.units.mass_unit_kg, lm.units.mass_unit_kg);
  d.N = d.sizing_enc.output;
  std::vector<Term> link{{d.Y, -1.0}};
  for (auto g : d.sizing_enc.binaries) link.push_back({g, 1.0});
  lm.milp.add_constraint(link, lm.units.tightening ? Sense::eq : Sense::le, 0.0, "g_active[" + tag + "]");
}

inline void encode_pwl_cost(LogisticsModel& lm, DeploymentCandidate& d) {
  const auto tag = d.tag();
  d.cost_enc = encode_pwl(lm.milp, d.cost, tag, d.F, "h", "Fg", "J", lm.units.mass_unit_kg, lm.units.cost_unit_usd);
  d.J = d.cost_enc.output;
  std::vector<Term> link{{d.Y, -1.0}};
  for (auto h : d.cost_enc.binaries) link.push_back({h, 1.0});
  lm.milp.add_constraint(link, lm.units.tightening ? Sense::eq : Sense::le, 0.0, "h_active[" + tag + "]");
}

/// z = Y * J with a per-use big-M. Throws when big_m is below the largest attainable J.
inline void add_manufacturing(LogisticsModel& lm, DeploymentCandidate& d, double big_m) {
  double max_cost = eval(d.cost, lm.config.options.max_plant_mass) / lm.units.cost_unit_usd;
  if (big_m < max_cost * (1.0 - 1e-12)) throw ValidationError("big-M " + format_double(big_m) + " below cost bound " + format_double(max_cost));
  d.big_m_cost = big_m;
  d.z = add_binary_product(lm.milp, d.Y, d.J, big_m, "z", d.tag(), lm.units.tightening);
}

/// X = Y * F, demanded as plant mass at the candidate node and step; spares demanded yearly after that.
/// P = Y * N feeds the processing capacity of later steps.
inline void add_facility_deployment(LogisticsModel& lm, DeploymentCandidate& d) {
  const auto& node = lm.net.node(d.node);
  if (!node.deployment_allowed.count(to_string(d.kind)))
    throw ValidationError(std::string(to_string(d.kind)) + " cannot be deployed at " + d.node);
  const auto tag = d.tag();
  d.big_m_mass = lm.config.options.max_plant_mass / lm.units.mass_unit_kg;
  d.X = add_binary_product(lm.milp, d.Y, d.F, d.big_m_mass, "X", tag, lm.units.tightening);
  d.big_m_rate = eval(d.sizing, lm.config.options.max_plant_mass) / lm.units.mass_unit_kg;
  d.P = add_binary_product(lm.milp, d.Y, d.N, d.big_m_rate, "P", tag, lm.units.tightening);
  lm.add_balance(d.node, d.step, "plant", d.X, 1.0);
  const auto& s = *std::find_if(lm.config.structures.begin(), lm.config.structures.end(),
                                [&](const IsruStructure& x) { return x.id == d.structure; });
  const int spy = lm.config.options.steps_per_year;
  for (int t = d.step + spy; t <= lm.net.horizon; t += spy) lm.add_balance(d.node, t, "spares", d.X, s.maintenance_fraction);
  const double dt = lm.step_years();
  for (auto& p : lm.processes)
    if (p.structure == d.structure && p.node == d.node && p.t >= d.step) p.capacity_terms.push_back({d.P, dt});
}

/// Deployment candidates for every allowed (structure, node) and every step from first reachability to horizon-1.
inline void add_deployment_candidates(LogisticsModel& lm) {
  auto reach = earliest_arrival(lm.net);
  for (const auto& s : lm.config.structures) {
    auto sizing = s.sizing.materialize(lm.config.options.max_plant_mass);
    auto cost = s.cost.materialize(lm.config.options.max_plant_mass);
    std::vector<std::string> locs = s.locations;
    std::sort(locs.begin(), locs.end(), [&](const std::string& a, const std::string& b) {
      return lm.net.node_index(a) < lm.net.node_index(b);
    });
    for (const auto& node : locs) {
      auto it = reach.find(node);
      if (it == reach.end()) continue;
      for (int te = it->second; te < lm.net.horizon; ++te) {
        DeploymentCandidate d{s.id, s.kind, node, te, sizing, cost, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, {}, {}};
        const auto tag = d.tag();
        d.Y = lm.milp.add_variable("Y[" + tag + "]", VarKind::binary, 0.0, 1.0);
        d.F = lm.milp.add_variable("F[" + tag + "]", VarKind::continuous, 0.0, lm.config.options.max_plant_mass / lm.units.mass_unit_kg);
        encode_pwl_sizing(lm, d);
        encode_pwl_cost(lm, d);
        add_manufacturing(lm, d, eval(cost, lm.config.options.max_plant_mass) / lm.units.cost_unit_usd);
        add_facility_deployment(lm, d);
        lm.candidates.push_back(std::move(d));
      }
    }
  }
}

/// Up to available_per_window new spacecraft per step, launched from the origin node.
inline void add_spacecraft_supply(LogisticsModel& lm) {
  const auto& v = lm.config.vehicle;
  std::string origin;
  for (const auto& n : lm.net.nodes)
    if (n.body_kind == BodyKind::planet_surface_origin) {
      origin = n.id;
      break;
    }
  if (origin.empty()) throw ValidationError("no launch origin node");
  double big_m = v.manufacturing_cost / lm.units.cost_unit_usd;
  for (int t = 0; t < lm.net.horizon; ++t) {
    std::size_t prev = 0;
    for (int s = 0; s < v.available_per_window; ++s) {
      std::string tag = std::to_string(t) + "," + std::to_string(s + 1);
      auto y = lm.milp.add_variable("Ysc[" + tag + "]", VarKind::binary, 0.0, 1.0);
      auto z = lm.milp.add_variable("zsc[" + tag + "]", VarKind::continuous, 0.0, kInf);
      lm.milp.add_constraint({{z, 1.0}, {y, -big_m}}, Sense::le, 0.0, "zsc_my[" + tag + "]");
      lm.milp.add_constraint({{z, 1.0}}, Sense::le, big_m, "zsc_le[" + tag + "]");
      lm.milp.add_constraint({{z, 1.0}, {y, -big_m}}, Sense::ge, 0.0, "zsc_ge[" + tag + "]");
      if (s > 0) lm.milp.add_constraint({{y, 1.0}, {prev, -1.0}}, Sense::le, 0.0, "Ysc_order[" + tag + "]");
      lm.add_balance(origin, t, v.count_commodity, y, -1.0);
      lm.spacecraft.push_back({t, s + 1, y, z});
      prev = y;
    }
  }
}

/// Vehicle capacity rows on every launch and transport slot; processing rate rows on every process slot.
inline void add_concurrency(LogisticsModel& lm) {
  const auto& cs = lm.config.commodities;
  auto cm = concurrency_matrix(lm.config.vehicle, cs, lm.config.tanks);
  for (const auto& f : lm.flows) {
    const auto& a = lm.arc(f);
    if (a.kind == ArcKind::holdover) continue;
    std::string base = arc_name(a) + "," + std::to_string(f.slot.t);
    for (Eigen::Index r = 0; r < cm.H.rows(); ++r) {
      std::vector<Term> terms;
      for (std::size_t k = 0; k < cs.size(); ++k) {
        double c = cm.H(r, static_cast<Eigen::Index>(k)) - cm.C(r, static_cast<Eigen::Index>(k));
        if (c != 0.0) terms.push_back({f.x[k], c * lm.commodity_scale(k) / lm.units.mass_unit_kg});
      }
      lm.milp.add_constraint(terms, Sense::le, 0.0, "cap_" + cm.names[static_cast<std::size_t>(r)] + "[" + base + "]");
    }
  }
  for (const auto& p : lm.processes) {
    std::vector<Term> terms{{p.w, 1.0}};
    for (const auto& [P, dt] : p.capacity_terms) terms.push_back({P, -dt});
    lm.milp.add_constraint(terms, Sense::le, p.initial_rate, "cap_rate[" + p.structure + "@" + p.node + "," + std::to_string(p.t) + "]");
  }
}

/// Outflow - Q inflow <= d per (node, step, commodity). Earth supplies continuous commodities up to a large bound.
inline void add_mass_balance(LogisticsModel& lm) {
  const auto& cs = lm.config.commodities;
  for (const auto& d : demand_schedule(lm.config)) {
    if (d.step < 0 || d.step > lm.net.horizon) continue;
    auto k = lm.commodity(d.commodity);
    lm.rhs[{d.node, d.step, d.commodity}] += d.amount / lm.commodity_scale(k);
  }
  const int spy = lm.config.options.steps_per_year;
  for (const auto& p : lm.config.options.initial_plant) {
    const auto& s = *std::find_if(lm.config.structures.begin(), lm.config.structures.end(),
                                  [&](const IsruStructure& x) { return x.id == p.structure; });
    for (int t = spy; t <= lm.net.horizon; t += spy)
      lm.rhs[{p.node, t, "spares"}] -= s.maintenance_fraction * p.mass / lm.units.mass_unit_kg;
  }
  for (const auto& n : lm.net.nodes) {
    bool origin = n.body_kind == BodyKind::planet_surface_origin;
    for (int t = 0; t <= lm.net.horizon; ++t) {
      for (std::size_t k = 0; k < cs.size(); ++k) {
        BalanceKey key{n.id, t, cs[k].id};
        double r = 0.0;
        if (auto it = lm.rhs.find(key); it != lm.rhs.end()) r = it->second;
        if (origin && cs[k].cls == CommodityClass::continuous) r += lm.config.costs.earth_supply / lm.commodity_scale(k);
        auto it = lm.pending.find(key);
        if (it == lm.pending.end() || it->second.empty()) {
          if (r < 0.0) throw ValidationError("demand at " + n.id + " step " + std::to_string(t) + " for " + cs[k].id + " has no flow that can serve it");
          continue;
        }
        lm.balance_rows[key] = lm.milp.add_constraint(it->second, Sense::le, r,
                                                      "bal[" + n.id + "," + std::to_string(t) + "," + cs[k].id + "]");
      }
    }
  }
}

/// Transportation costs on launch/transport slots plus manufacturing z terms; the pre-placed plant is a constant.
inline void assemble_objective(LogisticsModel& lm) {
  const auto& cs = lm.config.commodities;
  const double cu = lm.units.cost_unit_usd;
  auto sc = lm.commodity(lm.config.vehicle.count_commodity);
  for (const auto& f : lm.flows) {
    const auto& a = lm.arc(f);
    if (a.kind == ArcKind::launch) {
      for (std::size_t k = 0; k < cs.size(); ++k) {
        double price = 0.0;
        if (auto it = lm.config.costs.prices.find(cs[k].id); it != lm.config.costs.prices.end()) price = it->second;
        double c = (lm.config.costs.launch_per_kg * cs[k].unit_mass + price) * lm.commodity_scale(k) / cu;
        lm.milp.set_objective(f.x[k], c);
      }
    } else if (a.kind == ArcKind::transport) {
      lm.milp.set_objective(f.x[sc], lm.config.vehicle.flight_cost / cu);
    }
  }
  for (const auto& d : lm.candidates) lm.milp.set_objective(d.z, 1.0);
  for (const auto& s : lm.spacecraft) lm.milp.set_objective(s.z, 1.0);
  lm.milp.set_objective_constant(lm.initial_plant_cost / cu);
}

/// Manufacturing of the pre-placed plant as one unit of its total mass, plus its launch.
inline double initial_plant_cost(const ScenarioConfig& c) {
  double mass = 0.0;
  const IsruStructure* s = nullptr;
  for (const auto& p : c.options.initial_plant) {
    mass += p.mass;
    for (const auto& x : c.structures)
      if (x.id == p.structure && !s) s = &x;
  }
  if (mass <= 0.0 || !s) return 0.0;
  return eval(s->cost.materialize(c.options.max_plant_mass), mass) + mass * c.costs.launch_per_kg;
}

inline LogisticsModel build_logistics_model(const ScenarioConfig& config, std::optional<BuildOptions> opts = std::nullopt) {
  validate_scenario(config);
  LogisticsModel lm;
  lm.config = config;
  lm.units = opts ? *opts : BuildOptions::from(config);
  lm.milp.set_name(config.name);
  auto arcs = config.arcs;
  if (!lm.units.time_windows)
    for (auto& a : arcs) a.windows.clear();
  lm.net = build_time_expanded_graph(config.nodes, arcs, config.horizon(), 1);
  lm.initial_plant_cost = initial_plant_cost(config);
  add_flow_variables(lm);
  add_processing(lm);
  add_deployment_candidates(lm);
  add_spacecraft_supply(lm);
  add_concurrency(lm);
  add_mass_balance(lm);
  assemble_objective(lm);
  lm.pending.clear();
  lm.milp.validate();
  return lm;
}

/// Variable family prefixes of the assembled model, in declaration order.
inline std::vector<std::string> variable_families(const MilpModel& m) {
  std::vector<std::string> out;
  for (const auto& v : m.variables()) {
    auto fam = v.label.substr(0, v.label.find('['));
    if (std::find(out.begin(), out.end(), fam) == out.end()) out.push_back(fam);
  }
  return out;
}

}  // namespace isrulog
