#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "branch_bound.hpp"
#include "feasibility.hpp"
#include "formulation.hpp"

namespace isrulog {

/// Solves a logistics model. Integer values are snapped; continuous holdover counts are floored,
/// which keeps every balance row satisfied because all other count flows are integral.
inline Solution solve_logistics(const LogisticsModel& lm, MilpOptions opt = {}) {
  Solution s = solve_milp(lm.milp, std::move(opt));
  if (!s.has_incumbent()) return s;
  auto x = s.values;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (lm.milp.variable(j).is_integer()) x[j] = std::round(x[j]);
  for (const auto& f : lm.flows) {
    if (lm.arc(f).kind != ArcKind::holdover) continue;
    for (std::size_t k = 0; k < f.x.size(); ++k)
      if (lm.config.commodities[k].cls == CommodityClass::discrete) x[f.x[k]] = std::floor(x[f.x[k]] + 1e-6);
  }
  if (check_feasibility(lm.milp, x).feasible()) {
    s.values = std::move(x);
    s.objective = lm.milp.evaluate_objective(s.values);
  }
  return s;
}

/// Reliability branching with periodic rounding; the configuration used for scenario solves.
inline MilpOptions scenario_milp_options(double time_limit = kInf) {
  MilpOptions o;
  o.branching = Branching::reliability;
  o.time_limit = time_limit;
  return o;
}

struct FlowRecord {
  std::string from;
  std::string to;
  ArcKind kind;
  int depart;
  int arrive;
  /// Departing amounts in natural units (kg or count), global commodity order.
  std::vector<double> amounts;
};

struct DeploymentEvent {
  std::string structure;
  std::string node;
  int step;
  double mass;
  bool preplaced = false;
};

struct ManufacturingRecord {
  std::string item;
  int step;
  double mass;
  double cost;
};

struct ProcessRecord {
  std::string structure;
  std::string node;
  int t;
  /// Input processed during the step (kg); regolith-derived water for SWE, water for DWE.
  double amount;
};

struct MissionPlan {
  std::string scenario;
  SolveStatus status = SolveStatus::infeasible;
  int horizon = 0;
  int steps_per_year = 2;
  std::vector<std::string> commodities;
  std::vector<FlowRecord> flows;
  std::vector<DeploymentEvent> deployments;
  std::vector<ManufacturingRecord> manufacturing;
  std::vector<ProcessRecord> processing;
  /// Solver objective and bound in $.
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  double seconds = 0.0;

  double isru_mass() const {
    double m = 0.0;
    for (const auto& d : deployments) m += d.mass;
    return m;
  }
  std::size_t spacecraft_built() const {
    std::size_t n = 0;
    for (const auto& m : manufacturing)
      if (m.item == "spacecraft") ++n;
    return n;
  }
};

inline MissionPlan extract_plan(const Solution& sol, const LogisticsModel& lm, double threshold = 1e-6) {
  if (!sol.has_incumbent()) throw ValidationError("solution has no values to extract a plan from");
  const auto& x = sol.values;
  const auto& c = lm.config;
  MissionPlan p;
  p.scenario = c.name;
  p.status = sol.status;
  p.horizon = lm.net.horizon;
  p.steps_per_year = c.options.steps_per_year;
  for (const auto& k : c.commodities) p.commodities.push_back(k.id);
  const double cu = lm.units.cost_unit_usd;
  p.objective = sol.objective * cu;
  p.bound = sol.bound * cu;
  p.gap = sol.gap;
  p.seconds = sol.seconds;
  for (const auto& f : lm.flows) {
    const auto& a = lm.arc(f);
    FlowRecord r{a.origin, a.dest, a.kind, f.slot.t, f.slot.t + a.tof, {}};
    bool any = false;
    for (std::size_t k = 0; k < f.x.size(); ++k) {
      double v = x[f.x[k]] * lm.commodity_scale(k);
      if (std::abs(v) <= threshold * lm.commodity_scale(k)) v = 0.0;
      any |= v != 0.0;
      r.amounts.push_back(v);
    }
    if (any) p.flows.push_back(std::move(r));
  }
  for (const auto& part : c.options.initial_plant) p.deployments.push_back({part.structure, part.node, 0, part.mass, true});
  if (!c.options.initial_plant.empty()) {
    double mass = 0.0;
    for (const auto& part : c.options.initial_plant) mass += part.mass;
    p.manufacturing.push_back({"initial plant", 0, mass, lm.initial_plant_cost - mass * c.costs.launch_per_kg});
  }
  for (const auto& d : lm.candidates) {
    if (x[d.Y] < 0.5) continue;
    double mass = x[d.X] * lm.units.mass_unit_kg;
    p.deployments.push_back({d.structure, d.node, d.step, mass, false});
    p.manufacturing.push_back({d.structure + "@" + d.node, d.step, mass, x[d.z] * cu});
  }
  for (const auto& s : lm.spacecraft)
    if (x[s.Y] > 0.5) p.manufacturing.push_back({"spacecraft", s.step, c.vehicle.dry_mass, x[s.z] * cu});
  for (const auto& pr : lm.processes) {
    double v = x[pr.w] * lm.units.mass_unit_kg;
    if (v > threshold * lm.units.mass_unit_kg) p.processing.push_back({pr.structure, pr.node, pr.t, v});
  }
  return p;
}

struct CostBreakdown {
  double launch = 0.0;
  double flight_ops = 0.0;
  double propellant_purchase = 0.0;
  double tank = 0.0;
  double isru_manufacturing = 0.0;
  double spacecraft_manufacturing = 0.0;
  double spares = 0.0;

  double total() const {
    return launch + flight_ops + propellant_purchase + tank + isru_manufacturing + spacecraft_manufacturing + spares;
  }
};

/// Recomputed from plan flows, plant masses and unit costs; does not read solver cost variables.
inline CostBreakdown cost_breakdown(const MissionPlan& plan, const ScenarioConfig& c) {
  CostBreakdown b;
  std::set<std::string> tank_ids;
  for (const auto& t : c.tanks) tank_ids.insert(t.commodity);
  CommodityRoles roles;
  auto price = [&](const std::string& id) {
    auto it = c.costs.prices.find(id);
    return it == c.costs.prices.end() ? 0.0 : it->second;
  };
  for (const auto& f : plan.flows) {
    if (f.kind == ArcKind::launch) {
      for (std::size_t k = 0; k < c.commodities.size(); ++k) {
        const auto& id = c.commodities[k].id;
        double q = f.amounts[k];
        b.launch += q * c.commodities[k].unit_mass * c.costs.launch_per_kg;
        double v = q * price(id);
        if (id == roles.oxygen || id == roles.hydrogen) b.propellant_purchase += v;
        else if (tank_ids.count(id)) b.tank += v;
        else if (id == "spares") b.spares += v;
        else b.launch += v;
      }
    } else if (f.kind == ArcKind::transport) {
      b.flight_ops += f.amounts[commodity_index(c.commodities, c.vehicle.count_commodity)] * c.vehicle.flight_cost;
    }
  }
  double pre_mass = 0.0;
  for (const auto& d : plan.deployments)
    if (d.preplaced) pre_mass += d.mass;
  b.launch += pre_mass * c.costs.launch_per_kg;
  std::map<std::string, const IsruStructure*> by_id;
  for (const auto& s : c.structures) by_id[s.id] = &s;
  for (const auto& d : plan.deployments) {
    if (d.preplaced) continue;
    auto f = by_id.at(d.structure)->cost.materialize(c.options.max_plant_mass);
    b.isru_manufacturing += eval(f, std::clamp(d.mass, 1e-9, f.domain_max()));
  }
  if (pre_mass > 0.0) {
    const auto& first = c.options.initial_plant.front();
    b.isru_manufacturing += eval(by_id.at(first.structure)->cost.materialize(c.options.max_plant_mass), pre_mass);
  }
  b.spacecraft_manufacturing = static_cast<double>(plan.spacecraft_built()) * c.vehicle.manufacturing_cost;
  return b;
}

/// Max |w - Y v| / max(1, |Y v|) over each product family.
struct ProductCheck {
  double z = 0.0;
  double X = 0.0;
  double P = 0.0;
  /// Implied vehicle capacity on every propellant row versus C_v times the spacecraft count.
  double capacity = 0.0;
  std::size_t checked = 0;

  double worst() const { return std::max({z, X, P, capacity}); }
};

inline ProductCheck check_products(const LogisticsModel& lm, const std::vector<double>& x) {
  ProductCheck r;
  auto rel = [](double w, double y, double v) {
    double p = y * v;
    return std::abs(w - p) / std::max(1.0, std::abs(p));
  };
  for (const auto& d : lm.candidates) {
    double y = std::round(x[d.Y]);
    r.z = std::max(r.z, rel(x[d.z], y, x[d.J]));
    r.X = std::max(r.X, rel(x[d.X], y, x[d.F]));
    r.P = std::max(r.P, rel(x[d.P], y, x[d.N]));
    ++r.checked;
  }
  auto sc = lm.commodity(lm.config.vehicle.count_commodity);
  auto ox = lm.commodity(CommodityRoles{}.oxygen);
  for (const auto& f : lm.flows) {
    const auto& a = lm.arc(f);
    if (a.kind == ArcKind::holdover) continue;
    auto row = lm.milp.find_constraint("cap_propellant[" + arc_name(a) + "," + std::to_string(f.slot.t) + "]");
    if (!row) continue;
    double n = x[f.x[sc]], implied = 0.0, coef_ox = 0.0;
    for (const auto& t : lm.milp.constraint(*row).terms) {
      if (t.var == f.x[sc]) implied = -t.coef * n;
      if (t.var == f.x[ox]) coef_ox = t.coef;
    }
    implied *= lm.commodity_scale(ox) / coef_ox;
    double expected = lm.config.vehicle.propellant_capacity * n;
    r.capacity = std::max(r.capacity, std::abs(implied - expected) / std::max(1.0, expected));
    ++r.checked;
  }
  return r;
}

struct AuditIssue {
  std::string what;
  double amount;
};

struct ConservationAudit {
  double max_balance = 0.0;
  double max_burn = 0.0;
  double max_rate = 0.0;
  double cost_residual = 0.0;
  bool earth_supply_binds = false;
  std::vector<AuditIssue> issues;

  bool ok() const { return issues.empty(); }
};

/// Replays a plan in natural units: rocket-equation arrivals, electrolysis/extraction stoichiometry,
/// deployment and spares demands, processing rates, then compares the cost breakdown to the objective.
inline ConservationAudit audit_plan(const MissionPlan& plan, const ScenarioConfig& c, double tol = 1e-6) {
  ConservationAudit a;
  const auto& cs = c.commodities;
  const std::size_t nc = cs.size();
  CommodityRoles roles;
  auto idx = [&](const std::string& id) { return commodity_index(cs, id); };
  const auto ox = idx(roles.oxygen), fu = idx(roles.hydrogen), wa = idx(roles.water);
  const auto sc = idx(c.vehicle.count_commodity);
  const int H = plan.horizon;
  struct Acc {
    double lhs = 0.0, mag = 0.0, rhs = 0.0;
  };
  std::map<BalanceKey, Acc> bal;
  auto add = [&](const std::string& n, int t, std::size_t k, double v) {
    auto& e = bal[{n, t, cs[k].id}];
    e.lhs += v;
    e.mag += std::abs(v);
  };
  std::map<std::string, ArcSpec> arcs;
  for (const auto& ar : c.arcs) arcs[ar.origin + ">" + ar.dest] = ar;
  const double ve = kStandardGravity * c.vehicle.isp;
  const double share_ox = roles.mixture_ratio / (roles.mixture_ratio + 1.0);
  for (const auto& f : plan.flows) {
    std::vector<double> arrive = f.amounts;
    if (f.kind == ArcKind::transport) {
      double dv = arcs.at(f.from + ">" + f.to).delta_v;
      double m0 = 0.0;
      for (std::size_t k = 0; k < nc; ++k) m0 += f.amounts[k] * cs[k].unit_mass;
      double mf = m0 * std::exp(-dv / ve);
      double burned = m0 - mf;
      arrive[ox] -= share_ox * burned;
      arrive[fu] -= (1.0 - share_ox) * burned;
      double mf_check = 0.0;
      for (std::size_t k = 0; k < nc; ++k) mf_check += arrive[k] * cs[k].unit_mass;
      if (m0 > 0.0) {
        double err = std::abs(m0 - mf_check * std::exp(dv / ve)) / m0;
        double neg = std::max(0.0, -std::min(arrive[ox], arrive[fu])) / m0;
        a.max_burn = std::max({a.max_burn, err, neg});
        if (err > tol || neg > tol)
          a.issues.push_back({"propellant burn " + f.from + ">" + f.to + " at " + std::to_string(f.depart), std::max(err, neg)});
      }
    }
    for (std::size_t k = 0; k < nc; ++k) {
      add(f.from, f.depart, k, f.amounts[k]);
      add(f.to, f.arrive, k, -arrive[k]);
    }
  }
  std::map<std::string, const IsruStructure*> by_id;
  for (const auto& s : c.structures) by_id[s.id] = &s;
  for (const auto& p : plan.processing) {
    auto kind = by_id.at(p.structure)->kind;
    if (kind == IsruKind::SWE) {
      add(p.node, p.t + 1, wa, -p.amount);
    } else {
      add(p.node, p.t, wa, p.amount);
      add(p.node, p.t + 1, ox, -p.amount * 8.0 / 9.0);
      add(p.node, p.t + 1, fu, -p.amount / 9.0);
    }
  }
  const int spy = c.options.steps_per_year;
  const double dt = 1.0 / spy;
  for (const auto& d : plan.deployments) {
    if (!d.preplaced) add(d.node, d.step, idx("plant"), d.mass);
    int first = d.preplaced ? spy : d.step + spy;
    for (int t = first; t <= H; t += spy) add(d.node, t, idx("spares"), by_id.at(d.structure)->maintenance_fraction * d.mass);
  }
  std::string origin;
  for (const auto& n : c.nodes)
    if (n.body_kind == BodyKind::planet_surface_origin && origin.empty()) origin = n.id;
  for (const auto& m : plan.manufacturing)
    if (m.item == "spacecraft") add(origin, m.step, sc, -1.0);
  for (const auto& d : demand_schedule(c)) bal[{d.node, d.step, d.commodity}].rhs += d.amount;
  for (auto& [key, e] : bal) {
    const auto& [node, t, cid] = key;
    double rhs = e.rhs;
    bool supply = node == origin && cs[idx(cid)].cls == CommodityClass::continuous;
    if (supply) {
      rhs += c.costs.earth_supply;
      if (e.lhs >= 0.5 * c.costs.earth_supply) a.earth_supply_binds = true;
    }
    double res = std::max(0.0, e.lhs - rhs) / std::max({1.0, std::abs(e.rhs), e.mag});
    a.max_balance = std::max(a.max_balance, res);
    if (res > tol) a.issues.push_back({"mass balance " + node + " step " + std::to_string(t) + " " + cid, res});
  }
  for (const auto& p : plan.processing) {
    double cap = 0.0;
    const auto& s = *by_id.at(p.structure);
    auto f = s.sizing.materialize(c.options.max_plant_mass);
    for (const auto& d : plan.deployments)
      if (d.structure == p.structure && d.node == p.node && d.step <= p.t && d.mass > 0.0)
        cap += eval(f, std::clamp(d.mass, 0.0, f.domain_max())) * dt;
    double res = std::max(0.0, p.amount - cap) / std::max(1.0, cap);
    a.max_rate = std::max(a.max_rate, res);
    if (res > tol) a.issues.push_back({"processing rate " + p.structure + "@" + p.node + " step " + std::to_string(p.t), res});
  }
  if (a.earth_supply_binds) a.issues.push_back({"earth supply bound reached", 1.0});
  double total = cost_breakdown(plan, c).total();
  a.cost_residual = std::abs(total - plan.objective) / std::max(1.0, std::abs(plan.objective));
  if (a.cost_residual > tol) a.issues.push_back({"cost breakdown differs from objective", a.cost_residual});
  return a;
}

// ---------------------------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  std::string parameter;
  double value;
  Variant variant;
  bool setup;
  double objective;
  double isru_mass;
  SolveStatus status;
  double gap = 0.0;
  double seconds = 0.0;
};

struct SweepOptions {
  double time_limit = 120.0;
  /// 0 picks ISRULOG_WORKERS or the hardware thread count.
  unsigned workers = 0;
  bool warm_start = true;
  std::function<void(const SweepRow&)> progress;
};

inline unsigned sweep_workers(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ISRULOG_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Grid "a:b:step" inclusive of b (within half a step of rounding).
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ValidationError("bad grid " + spec);
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw ValidationError("grid must be a:b:step with step > 0 and b >= a");
  std::vector<double> out;
  std::size_t n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return out;
}

/// Starting point for a model from another model's solution: integers taken by label (0 when absent),
/// continuous part re-optimized with those integers fixed. Empty when that is infeasible.
inline std::vector<double> warm_start_from(const MilpModel& target, const MilpModel& source, const std::vector<double>& values) {
  MilpModel fixed = target;
  for (std::size_t j = 0; j < target.num_variables(); ++j) {
    const auto& v = target.variable(j);
    if (!v.is_integer()) continue;
    double val = 0.0;
    if (auto s = source.find_variable(v.label)) val = std::round(values[*s]);
    val = std::clamp(val, v.lower, v.upper);
    fixed.set_bounds(j, val, val);
  }
  Solution s;
  try {
    s = solve_lp(fixed.relaxation());
  } catch (const NumericalError&) {
    return {};
  }
  if (s.status != SolveStatus::optimal) return {};
  for (std::size_t j = 0; j < target.num_variables(); ++j)
    if (target.variable(j).is_integer()) s.values[j] = std::round(s.values[j]);
  return s.values;
}

/// One chain per base config, walked in the order that lets each point warm-start from a
/// solution feasible for it (ascending multipliers; descending for mission-years).
/// Chains run in parallel; rows come back sorted by (variant, setup, value).
inline std::vector<SweepRow> run_sweep(const std::vector<ScenarioConfig>& bases, const std::string& parameter,
                                       std::vector<double> grid, SweepOptions opt = {}) {
  if (grid.empty()) throw ValidationError("empty sweep grid");
  for (double g : grid)
    if (!std::isfinite(g)) throw ValidationError("non-finite grid value");
  std::sort(grid.begin(), grid.end());
  if (parameter == "mission-years") std::reverse(grid.begin(), grid.end());
  std::vector<ScenarioConfig> configs;
  for (const auto& b : bases)
    for (double g : grid) configs.push_back(apply_override(b, parameter, g));
  std::vector<SweepRow> rows(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto chain = [&](std::size_t b) {
    std::optional<LogisticsModel> prev;
    std::vector<double> prev_x;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::size_t k = b * grid.size() + i;
      const auto& cfg = configs[k];
      auto lm = build_logistics_model(cfg);
      auto mo = scenario_milp_options(opt.time_limit);
      if (opt.warm_start && prev && !prev_x.empty()) mo.initial_solution = warm_start_from(lm.milp, prev->milp, prev_x);
      Solution s = solve_logistics(lm, mo);
      SweepRow r{parameter, grid[i], cfg.variant, cfg.setup_phase, kInf, 0.0, s.status, s.gap, s.seconds};
      if (s.has_incumbent()) {
        auto plan = extract_plan(s, lm);
        r.objective = plan.objective;
        r.isru_mass = plan.isru_mass();
        prev_x = s.values;
      } else {
        prev_x.clear();
      }
      prev = std::move(lm);
      rows[k] = r;
      if (opt.progress) {
        std::lock_guard<std::mutex> lock(mu);
        opt.progress(r);
      }
    }
  };
  unsigned workers = std::min<unsigned>(sweep_workers(opt.workers), static_cast<unsigned>(bases.size()));
  if (workers <= 1) {
    for (std::size_t b = 0; b < bases.size(); ++b) chain(b);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t b = next++; b < bases.size(); b = next++) chain(b);
      });
    for (auto& t : pool) t.join();
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.variant != b.variant) return a.variant < b.variant;
    if (a.setup != b.setup) return a.setup < b.setup;
    return a.value < b.value;
  });
  return rows;
}

// ---------------------------------------------------------------------------------------------
// Emission

inline std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : ""; }

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "parameter,variant,setup,objective,isru_mass,status\n";
  for (const auto& r : rows)
    os << r.parameter << "=" << format_double(r.value) << ',' << to_string(r.variant) << ',' << (r.setup ? "true" : "false") << ','
       << csv_number(r.objective) << ',' << csv_number(r.isru_mass) << ',' << to_string(r.status) << "\n";
  return os.str();
}

inline std::string cost_csv(const CostBreakdown& b) {
  std::ostringstream os;
  os << "component,usd\n";
  os << "launch," << format_double(b.launch) << "\n";
  os << "flight-ops," << format_double(b.flight_ops) << "\n";
  os << "propellant-purchase," << format_double(b.propellant_purchase) << "\n";
  os << "tank," << format_double(b.tank) << "\n";
  os << "ISRU-manufacturing," << format_double(b.isru_manufacturing) << "\n";
  os << "spacecraft-manufacturing," << format_double(b.spacecraft_manufacturing) << "\n";
  os << "spares," << format_double(b.spares) << "\n";
  os << "total," << format_double(b.total()) << "\n";
  return os.str();
}

inline const char* arc_kind_name(ArcKind k) {
  switch (k) {
    case ArcKind::launch: return "launch";
    case ArcKind::transport: return "transport";
    case ArcKind::holdover: return "holdover";
  }
  return "?";
}

/// Flows per step; the first line maps steps to months.
inline std::string plan_csv(const MissionPlan& p) {
  std::ostringstream os;
  int months = 12 / std::max(1, p.steps_per_year);
  os << "# step->month:";
  for (int t = 0; t <= p.horizon; ++t) os << ' ' << t << '=' << t * months;
  os << "\n";
  os << "depart,arrive,from,to,kind";
  for (const auto& c : p.commodities) os << ',' << c;
  os << "\n";
  for (const auto& f : p.flows) {
    os << f.depart << ',' << f.arrive << ',' << f.from << ',' << f.to << ',' << arc_kind_name(f.kind);
    for (double v : f.amounts) os << ',' << format_double(v);
    os << "\n";
  }
  return os.str();
}

inline std::string deployments_csv(const MissionPlan& p) {
  std::ostringstream os;
  os << "structure,node,step,mass_kg,preplaced\n";
  for (const auto& d : p.deployments)
    os << d.structure << ',' << d.node << ',' << d.step << ',' << format_double(d.mass) << ',' << (d.preplaced ? "true" : "false") << "\n";
  return os.str();
}

inline std::string manufacturing_csv(const MissionPlan& p) {
  std::ostringstream os;
  os << "item,step,mass_kg,cost_usd\n";
  for (const auto& m : p.manufacturing) os << m.item << ',' << m.step << ',' << format_double(m.mass) << ',' << format_double(m.cost) << "\n";
  return os.str();
}

/// Solution vector as label,value lines (model units), readable by `check`.
inline std::string solution_csv(const MilpModel& m, const std::vector<double>& x) {
  std::ostringstream os;
  os << "variable,value\n";
  for (std::size_t j = 0; j < m.num_variables(); ++j) os << m.variable(j).label << ',' << format_double(x[j]) << "\n";
  return os.str();
}

inline std::vector<double> parse_solution_csv(const MilpModel& m, const std::string& text) {
  std::vector<double> x(m.num_variables(), 0.0);
  std::vector<bool> seen(m.num_variables(), false);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("variable,", 0) == 0) continue;
    if (line.empty()) continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ValidationError("solution line " + std::to_string(lineno) + ": expected label,value");
    auto label = line.substr(0, comma);
    auto j = m.find_variable(label);
    if (!j) throw ValidationError("solution line " + std::to_string(lineno) + ": unknown variable " + label);
    try {
      x[*j] = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ValidationError("solution line " + std::to_string(lineno) + ": bad value");
    }
    seen[*j] = true;
  }
  for (std::size_t j = 0; j < seen.size(); ++j)
    if (!seen[j]) throw ValidationError("solution is missing variable " + m.variable(j).label);
  return x;
}

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Static line chart, one polyline per series.
inline std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                  const std::vector<SvgSeries>& series) {
  const double W = 640, H = 400, L = 80, R = 160, T = 40, B = 50;
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (!std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << format_double(std::round(xv * 1000) / 1000) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << format_double(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (auto [x, y] : series[s].points) {
      if (!std::isfinite(y)) continue;
      os << (first ? "" : " ") << num(px(x)) << ',' << num(py(y));
      first = false;
    }
    os << "\"/>\n";
    double ly = T + 16 * static_cast<double>(s);
    os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\">" << series[s].name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Cost ($B) against the swept value, one series per variant/setup combination.
inline std::string sweep_svg(const std::vector<SweepRow>& rows) {
  std::vector<SvgSeries> series;
  std::string param = rows.empty() ? "" : rows.front().parameter;
  for (const auto& r : rows) {
    std::string name = std::string(to_string(r.variant)) + (r.setup ? " (setup)" : "");
    auto it = std::find_if(series.begin(), series.end(), [&](const SvgSeries& s) { return s.name == name; });
    if (it == series.end()) {
      series.push_back({name, {}});
      it = series.end() - 1;
    }
    it->points.push_back({r.value, r.objective / 1e9});
  }
  return svg_line_chart("Mission cost vs " + param, param + " multiplier", "cost ($B)", series);
}

}  // namespace isrulog
