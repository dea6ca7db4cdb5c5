#pragma once

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "network.hpp"
#include "pwl.hpp"

namespace isrulog {

enum class Variant { concentrated, distributed };

inline const char* to_string(Variant v) { return v == Variant::concentrated ? "concentrated" : "distributed"; }

inline Variant parse_variant(const std::string& s) {
  if (s == "concentrated") return Variant::concentrated;
  if (s == "distributed") return Variant::distributed;
  throw ValidationError("unknown variant " + s);
}

/// A PWL given either by its generating rule or directly as a table.
struct PwlSource {
  std::optional<ScalingRule> rule;
  std::optional<PiecewiseLinear> table;

  /// Rules are expanded to cover [0, max_quantity].
  PiecewiseLinear materialize(double max_quantity) const {
    if (rule) return from_scaling_rule(*rule, max_quantity);
    if (table) return *table;
    throw ValidationError("piecewise-linear source has neither rule nor table");
  }
  bool operator==(const PwlSource&) const = default;
};

struct IsruStructure {
  std::string id;
  IsruKind kind = IsruKind::SWE;
  /// Plant mass (kg) -> annual productivity (kg/yr); water output for SWE, water input for DWE.
  PwlSource sizing;
  /// Plant mass (kg) -> manufacturing cost ($).
  PwlSource cost;
  /// Nodes where this structure may be deployed (the nonzero pattern of B).
  std::vector<std::string> locations;
  double maintenance_fraction = 0.05;

  bool operator==(const IsruStructure&) const = default;
};

/// Signed amount; negative is a demand. Entries without a step repeat every mission year.
struct DemandEntry {
  std::string node;
  std::string commodity;
  double amount = 0.0;
  std::optional<int> step;

  bool operator==(const DemandEntry&) const = default;
};

struct InitialPlantPart {
  std::string structure;
  std::string node;
  double mass = 0.0;

  bool operator==(const InitialPlantPart&) const = default;
};

struct CostParams {
  double launch_per_kg = 5000.0;
  /// Purchase price per unit launched from Earth, by commodity.
  std::map<std::string, double> prices;
  /// Finite stand-in for unlimited Earth supply of each continuous commodity.
  double earth_supply = 1e9;

  bool operator==(const CostParams&) const = default;
};

struct ScenarioOptions {
  int mission_years = 3;
  int steps_per_year = 2;
  double max_plant_mass = 15000.0;
  /// Units of the assembled MILP: kg per model mass unit, $ per model cost unit.
  double mass_unit_kg = 1000.0;
  double cost_unit_usd = 1e6;
  /// Pre-placed plant present at step 0 (empty when the setup phase is on).
  std::vector<InitialPlantPart> initial_plant;

  bool operator==(const ScenarioOptions&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Variant variant = Variant::concentrated;
  bool setup_phase = false;
  std::vector<NodeSpec> nodes;
  std::vector<ArcSpec> arcs;
  std::vector<Commodity> commodities;
  VehicleSpec vehicle;
  std::vector<TankSpec> tanks;
  std::vector<IsruStructure> structures;
  std::vector<DemandEntry> demands;
  CostParams costs;
  ScenarioOptions options;
  /// Multipliers applied so far, by override name.
  std::map<std::string, double> overrides;

  int setup_steps() const { return setup_phase ? options.steps_per_year : 0; }
  int horizon() const { return (options.mission_years + (setup_phase ? 1 : 0)) * options.steps_per_year; }
  double step_years() const { return 1.0 / options.steps_per_year; }

  bool operator==(const ScenarioConfig&) const = default;
};

struct ScheduledDemand {
  std::string node;
  std::string commodity;
  int step;
  double amount;
};

/// Annual entries land at the end of each mission year, i.e. every steps_per_year steps after the setup phase.
inline std::vector<ScheduledDemand> demand_schedule(const ScenarioConfig& c) {
  std::vector<ScheduledDemand> out;
  for (const auto& d : c.demands) {
    if (d.step) {
      out.push_back({d.node, d.commodity, *d.step, d.amount});
      continue;
    }
    for (int y = 1; y <= c.options.mission_years; ++y)
      out.push_back({d.node, d.commodity, c.setup_steps() + y * c.options.steps_per_year, d.amount});
  }
  return out;
}

namespace scenario_detail {

using json = nlohmann::ordered_json;

/// Walks a JSON document remembering the JSON pointer of the current element.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_.empty() ? "/" : path_, what); }

  void expect_object(const std::set<std::string>& allowed) const {
    if (!j_.is_object()) fail("expected object");
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!allowed.count(it.key())) Reader(it.value(), path_ + "/" + it.key()).fail("unknown key");
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  Reader at(const std::string& key) const {
    if (!j_.contains(key)) fail("missing key \"" + key + "\"");
    return Reader(j_.at(key), path_ + "/" + key);
  }
  std::vector<Reader> items() const {
    if (!j_.is_array()) fail("expected array");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "/" + std::to_string(i));
    return out;
  }
  double number() const {
    if (!j_.is_number()) fail("expected number");
    double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected finite number");
    return v;
  }
  double number_or_inf() const {
    if (j_.is_string() && j_.get<std::string>() == "inf") return kInfinity;
    return number();
  }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected integer");
    return j_.get<int>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected string");
    return j_.get<std::string>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected boolean");
    return j_.get<bool>();
  }

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

 private:
  const json& j_;
  std::string path_;
};

inline BodyKind parse_body(const Reader& r) {
  auto s = r.string();
  if (s == "surface") return BodyKind::surface;
  if (s == "orbit") return BodyKind::orbit;
  if (s == "planet-surface-origin") return BodyKind::planet_surface_origin;
  r.fail("unknown body kind " + s);
}

inline const char* body_name(BodyKind b) {
  switch (b) {
    case BodyKind::surface: return "surface";
    case BodyKind::orbit: return "orbit";
    case BodyKind::planet_surface_origin: return "planet-surface-origin";
  }
  return "?";
}

inline ArcKind parse_arc_kind(const Reader& r) {
  auto s = r.string();
  if (s == "transport") return ArcKind::transport;
  if (s == "launch") return ArcKind::launch;
  r.fail("unknown arc kind " + s + " (holdover arcs are generated)");
}

inline PwlSource parse_pwl(const Reader& r) {
  r.expect_object({"rule", "table"});
  PwlSource p;
  if (r.has("rule") == r.has("table")) r.fail("exactly one of rule/table required");
  if (r.has("rule")) {
    auto q = r.at("rule");
    q.expect_object({"base_slope", "interval_width", "rate", "direction", "flat_head"});
    ScalingRule s;
    s.base_slope = q.at("base_slope").number();
    s.interval_width = q.at("interval_width").number();
    s.rate = q.at("rate").number();
    auto dir = q.at("direction");
    auto ds = dir.string();
    if (ds == "discount") s.direction = ScalingDirection::discount;
    else if (ds == "premium") s.direction = ScalingDirection::premium;
    else dir.fail("direction must be discount or premium");
    if (q.has("flat_head")) {
      auto h = q.at("flat_head");
      h.expect_object({"width", "value"});
      s.flat_head = FlatHead{h.at("width").number(), h.at("value").number()};
    }
    try {
      (void)from_scaling_rule(s.base_slope, s.interval_width, s.rate, s.direction, 2, s.flat_head);
    } catch (const DomainError& e) {
      q.fail(e.what());
    }
    p.rule = s;
  } else {
    auto t = r.at("table");
    t.expect_object({"segments", "flat_head"});
    PiecewiseLinear f;
    if (t.has("flat_head")) f.flat_head = t.at("flat_head").boolean();
    for (const auto& seg : t.at("segments").items()) {
      seg.expect_object({"breakpoint", "slope", "intercept"});
      f.breakpoints.push_back(seg.at("breakpoint").number());
      f.slopes.push_back(seg.at("slope").number());
      f.intercepts.push_back(seg.at("intercept").number());
    }
    p.table = f;
  }
  return p;
}

inline json pwl_json(const PwlSource& p) {
  json j = json::object();
  if (p.rule) {
    const auto& s = *p.rule;
    json r = {{"base_slope", s.base_slope},
              {"interval_width", s.interval_width},
              {"rate", s.rate},
              {"direction", s.direction == ScalingDirection::discount ? "discount" : "premium"}};
    if (s.flat_head) r["flat_head"] = {{"width", s.flat_head->width}, {"value", s.flat_head->value}};
    j["rule"] = r;
  } else if (p.table) {
    json segs = json::array();
    for (std::size_t k = 0; k < p.table->slopes.size(); ++k)
      segs.push_back({{"breakpoint", p.table->breakpoints[k + 1]}, {"slope", p.table->slopes[k]}, {"intercept", p.table->intercepts[k]}});
    j["table"] = {{"segments", segs}, {"flat_head", p.table->flat_head}};
  }
  return j;
}

inline json number_or_inf(double v) { return std::isfinite(v) ? json(v) : json("inf"); }

}  // namespace scenario_detail

/// Structural checks beyond the schema: references resolve, tables are valid functions, values are in range.
inline void validate_scenario(const ScenarioConfig& c) {
  std::set<std::string> nodes, comms;
  for (const auto& n : c.nodes) nodes.insert(n.id);
  for (const auto& k : c.commodities) comms.insert(k.id);
  auto need_node = [&](const std::string& id, const std::string& where) {
    if (!nodes.count(id)) throw ValidationError(where + ": unknown node " + id);
  };
  auto need_comm = [&](const std::string& id, const std::string& where) {
    if (!comms.count(id)) throw ValidationError(where + ": unknown commodity " + id);
  };
  if (!(c.vehicle.isp > 0.0)) throw ValidationError("vehicle isp must be positive");
  if (!(c.vehicle.dry_mass >= 0.0) || !(c.vehicle.propellant_capacity >= 0.0)) throw ValidationError("vehicle masses must be non-negative");
  if (c.vehicle.available_per_window < 0) throw ValidationError("vehicle availability must be non-negative");
  need_comm(c.vehicle.count_commodity, "vehicle");
  for (const auto& k : c.commodities)
    if (!(k.unit_mass >= 0.0)) throw ValidationError("commodity " + k.id + ": negative unit mass");
  for (const auto& a : c.arcs) {
    need_node(a.origin, "arc");
    need_node(a.dest, "arc");
    if (a.delta_v < 0.0) throw ValidationError("arc " + a.origin + "->" + a.dest + ": negative delta-v");
    if (a.kind == ArcKind::transport && a.tof < 1) throw ValidationError("arc " + a.origin + "->" + a.dest + ": transport tof must be >= 1");
    if (a.tof < 0) throw ValidationError("arc " + a.origin + "->" + a.dest + ": negative tof");
  }
  for (const auto& t : c.tanks) {
    need_comm(t.commodity, "tank");
    for (const auto& h : t.holds) need_comm(h, "tank " + t.commodity);
    if (!(t.capacity_ratio > 0.0)) throw ValidationError("tank " + t.commodity + ": capacity ratio must be positive");
  }
  std::set<std::string> sids;
  for (const auto& s : c.structures) {
    if (!sids.insert(s.id).second) throw ValidationError("duplicate structure " + s.id);
    for (const auto& l : s.locations) {
      need_node(l, "structure " + s.id);
      const auto& n = *std::find_if(c.nodes.begin(), c.nodes.end(), [&](const NodeSpec& x) { return x.id == l; });
      if (!n.deployment_allowed.count(to_string(s.kind)))
        throw ValidationError("structure " + s.id + ": " + to_string(s.kind) + " not deployable at " + l);
    }
    try {
      validate_pwl(s.sizing.materialize(c.options.max_plant_mass), Curvature::convex);
      validate_pwl(s.cost.materialize(c.options.max_plant_mass), Curvature::concave);
    } catch (const DomainError& e) {
      throw ValidationError("structure " + s.id + ": " + e.what());
    }
    if (s.sizing.materialize(c.options.max_plant_mass).domain_max() < c.options.max_plant_mass ||
        s.cost.materialize(c.options.max_plant_mass).domain_max() < c.options.max_plant_mass)
      throw ValidationError("structure " + s.id + ": table does not cover the maximum plant mass");
    if (s.maintenance_fraction < 0.0) throw ValidationError("structure " + s.id + ": negative maintenance fraction");
  }
  for (const auto& d : c.demands) {
    need_node(d.node, "demand");
    need_comm(d.commodity, "demand");
    if (d.step && (*d.step < 0 || *d.step > c.horizon())) throw ValidationError("demand step outside horizon");
  }
  for (const auto& p : c.options.initial_plant) {
    need_node(p.node, "initial plant");
    if (!sids.count(p.structure)) throw ValidationError("initial plant: unknown structure " + p.structure);
    if (!(p.mass > 0.0)) throw ValidationError("initial plant: mass must be positive");
  }
  if (c.options.mission_years < 1 || c.options.steps_per_year < 1) throw ValidationError("mission years and steps per year must be >= 1");
  if (!(c.options.max_plant_mass > 0.0)) throw ValidationError("max plant mass must be positive");
  if (!(c.options.mass_unit_kg > 0.0) || !(c.options.cost_unit_usd > 0.0)) throw ValidationError("model units must be positive");
  if (!(c.costs.earth_supply > 0.0)) throw ValidationError("earth supply must be positive");
}

inline ScenarioConfig parse_scenario(const std::string& document) {
  using namespace scenario_detail;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
  Reader root(doc, "");
  root.expect_object({"name", "variant", "setup_phase", "nodes", "arcs", "commodities", "vehicles", "structures",
                      "demands", "costs", "options", "overrides"});
  ScenarioConfig c;
  if (root.has("name")) c.name = root.at("name").string();
  {
    auto v = root.at("variant");
    auto s = v.string();
    if (s != "concentrated" && s != "distributed") v.fail("variant must be concentrated or distributed");
    c.variant = parse_variant(s);
  }
  c.setup_phase = root.at("setup_phase").boolean();
  for (const auto& r : root.at("nodes").items()) {
    r.expect_object({"id", "name", "body_kind", "deployment_allowed"});
    NodeSpec n;
    n.id = r.at("id").string();
    n.name = r.has("name") ? r.at("name").string() : n.id;
    n.body_kind = parse_body(r.at("body_kind"));
    if (r.has("deployment_allowed"))
      for (const auto& k : r.at("deployment_allowed").items()) n.deployment_allowed.insert(k.string());
    c.nodes.push_back(n);
  }
  for (const auto& r : root.at("arcs").items()) {
    r.expect_object({"origin", "dest", "delta_v", "tof", "windows", "kind"});
    ArcSpec a;
    a.origin = r.at("origin").string();
    a.dest = r.at("dest").string();
    a.delta_v = r.at("delta_v").number();
    if (a.delta_v < 0.0) r.at("delta_v").fail("delta-v must be non-negative");
    a.tof = r.at("tof").integer();
    a.kind = r.has("kind") ? parse_arc_kind(r.at("kind")) : ArcKind::transport;
    if (r.has("windows"))
      for (const auto& w : r.at("windows").items()) a.windows.insert(w.integer());
    c.arcs.push_back(a);
  }
  for (const auto& r : root.at("commodities").items()) {
    r.expect_object({"id", "name", "class", "unit", "unit_mass"});
    Commodity k;
    k.id = r.at("id").string();
    k.name = r.has("name") ? r.at("name").string() : k.id;
    auto cls = r.at("class");
    auto s = cls.string();
    if (s == "continuous") k.cls = CommodityClass::continuous;
    else if (s == "discrete") k.cls = CommodityClass::discrete;
    else cls.fail("class must be continuous or discrete");
    if (r.has("unit")) k.unit = r.at("unit").string();
    if (r.has("unit_mass")) k.unit_mass = r.at("unit_mass").number();
    c.commodities.push_back(k);
  }
  {
    auto vs = root.at("vehicles").items();
    if (vs.size() != 1) root.at("vehicles").fail("exactly one vehicle class is supported");
    const auto& r = vs[0];
    r.expect_object({"id", "count_commodity", "isp", "dry_mass", "propellant_capacity", "payload_capacity",
                     "available_per_window", "manufacturing_cost", "flight_cost"});
    auto& v = c.vehicle;
    v.id = r.at("id").string();
    v.count_commodity = r.at("count_commodity").string();
    v.isp = r.at("isp").number();
    if (!(v.isp > 0.0)) r.at("isp").fail("isp must be positive");
    v.dry_mass = r.at("dry_mass").number();
    v.propellant_capacity = r.at("propellant_capacity").number();
    if (r.has("payload_capacity")) v.payload_capacity = r.at("payload_capacity").number_or_inf();
    v.available_per_window = r.at("available_per_window").integer();
    v.manufacturing_cost = r.at("manufacturing_cost").number();
    v.flight_cost = r.at("flight_cost").number();
  }
  {
    auto s = root.at("structures");
    s.expect_object({"isru", "tanks"});
    for (const auto& r : s.at("isru").items()) {
      r.expect_object({"id", "kind", "sizing", "cost", "locations", "maintenance_fraction"});
      IsruStructure e;
      e.id = r.at("id").string();
      auto k = r.at("kind");
      auto ks = k.string();
      if (ks != "SWE" && ks != "DWE") k.fail("kind must be SWE or DWE");
      e.kind = parse_isru_kind(ks);
      e.sizing = parse_pwl(r.at("sizing"));
      e.cost = parse_pwl(r.at("cost"));
      for (const auto& l : r.at("locations").items()) e.locations.push_back(l.string());
      if (r.has("maintenance_fraction")) e.maintenance_fraction = r.at("maintenance_fraction").number();
      c.structures.push_back(e);
    }
    if (s.has("tanks"))
      for (const auto& r : s.at("tanks").items()) {
        r.expect_object({"commodity", "capacity_ratio", "holds"});
        TankSpec t;
        t.commodity = r.at("commodity").string();
        t.capacity_ratio = r.at("capacity_ratio").number();
        for (const auto& h : r.at("holds").items()) t.holds.push_back(h.string());
        c.tanks.push_back(t);
      }
  }
  for (const auto& r : root.at("demands").items()) {
    r.expect_object({"node", "commodity", "amount", "step"});
    DemandEntry d;
    d.node = r.at("node").string();
    d.commodity = r.at("commodity").string();
    d.amount = r.at("amount").number();
    if (r.has("step")) d.step = r.at("step").integer();
    c.demands.push_back(d);
  }
  {
    auto r = root.at("costs");
    r.expect_object({"launch_per_kg", "prices", "earth_supply"});
    c.costs.launch_per_kg = r.at("launch_per_kg").number();
    if (r.has("prices")) {
      auto p = r.at("prices");
      if (!p.raw().is_object()) p.fail("expected object");
      for (auto it = p.raw().begin(); it != p.raw().end(); ++it)
        c.costs.prices[it.key()] = Reader(it.value(), p.path() + "/" + it.key()).number();
    }
    if (r.has("earth_supply")) c.costs.earth_supply = r.at("earth_supply").number();
  }
  if (root.has("options")) {
    auto r = root.at("options");
    r.expect_object({"mission_years", "steps_per_year", "max_plant_mass", "mass_unit_kg", "cost_unit_usd", "initial_plant"});
    auto& o = c.options;
    if (r.has("mission_years")) o.mission_years = r.at("mission_years").integer();
    if (r.has("steps_per_year")) o.steps_per_year = r.at("steps_per_year").integer();
    if (r.has("max_plant_mass")) o.max_plant_mass = r.at("max_plant_mass").number();
    if (r.has("mass_unit_kg")) o.mass_unit_kg = r.at("mass_unit_kg").number();
    if (r.has("cost_unit_usd")) o.cost_unit_usd = r.at("cost_unit_usd").number();
    if (r.has("initial_plant"))
      for (const auto& p : r.at("initial_plant").items()) {
        p.expect_object({"structure", "node", "mass"});
        o.initial_plant.push_back({p.at("structure").string(), p.at("node").string(), p.at("mass").number()});
      }
  }
  if (root.has("overrides")) {
    auto r = root.at("overrides");
    if (!r.raw().is_object()) r.fail("expected object");
    for (auto it = r.raw().begin(); it != r.raw().end(); ++it)
      c.overrides[it.key()] = Reader(it.value(), r.path() + "/" + it.key()).number();
  }
  validate_scenario(c);
  return c;
}

inline std::string serialize_scenario(const ScenarioConfig& c) {
  using namespace scenario_detail;
  json j;
  j["name"] = c.name;
  j["variant"] = to_string(c.variant);
  j["setup_phase"] = c.setup_phase;
  j["nodes"] = json::array();
  for (const auto& n : c.nodes)
    j["nodes"].push_back({{"id", n.id}, {"name", n.name}, {"body_kind", body_name(n.body_kind)},
                          {"deployment_allowed", std::vector<std::string>(n.deployment_allowed.begin(), n.deployment_allowed.end())}});
  j["arcs"] = json::array();
  for (const auto& a : c.arcs) {
    json x = {{"origin", a.origin}, {"dest", a.dest}, {"delta_v", a.delta_v}, {"tof", a.tof},
              {"kind", a.kind == ArcKind::launch ? "launch" : "transport"}};
    if (!a.windows.empty()) x["windows"] = std::vector<int>(a.windows.begin(), a.windows.end());
    j["arcs"].push_back(x);
  }
  j["commodities"] = json::array();
  for (const auto& k : c.commodities)
    j["commodities"].push_back({{"id", k.id}, {"name", k.name}, {"class", k.cls == CommodityClass::continuous ? "continuous" : "discrete"},
                                {"unit", k.unit}, {"unit_mass", k.unit_mass}});
  const auto& v = c.vehicle;
  j["vehicles"] = json::array({json{{"id", v.id}, {"count_commodity", v.count_commodity}, {"isp", v.isp}, {"dry_mass", v.dry_mass},
                                    {"propellant_capacity", v.propellant_capacity}, {"payload_capacity", number_or_inf(v.payload_capacity)},
                                    {"available_per_window", v.available_per_window}, {"manufacturing_cost", v.manufacturing_cost},
                                    {"flight_cost", v.flight_cost}}});
  json isru = json::array();
  for (const auto& s : c.structures)
    isru.push_back({{"id", s.id}, {"kind", to_string(s.kind)}, {"sizing", pwl_json(s.sizing)}, {"cost", pwl_json(s.cost)},
                    {"locations", s.locations}, {"maintenance_fraction", s.maintenance_fraction}});
  json tanks = json::array();
  for (const auto& t : c.tanks) tanks.push_back({{"commodity", t.commodity}, {"capacity_ratio", t.capacity_ratio}, {"holds", t.holds}});
  j["structures"] = {{"isru", isru}, {"tanks", tanks}};
  j["demands"] = json::array();
  for (const auto& d : c.demands) {
    json x = {{"node", d.node}, {"commodity", d.commodity}, {"amount", d.amount}};
    if (d.step) x["step"] = *d.step;
    j["demands"].push_back(x);
  }
  j["costs"] = {{"launch_per_kg", c.costs.launch_per_kg}, {"prices", c.costs.prices}, {"earth_supply", c.costs.earth_supply}};
  json init = json::array();
  for (const auto& p : c.options.initial_plant) init.push_back({{"structure", p.structure}, {"node", p.node}, {"mass", p.mass}});
  j["options"] = {{"mission_years", c.options.mission_years}, {"steps_per_year", c.options.steps_per_year},
                  {"max_plant_mass", c.options.max_plant_mass}, {"mass_unit_kg", c.options.mass_unit_kg},
                  {"cost_unit_usd", c.options.cost_unit_usd}, {"initial_plant", init}};
  j["overrides"] = c.overrides;
  return j.dump(2) + "\n";
}

/// Default transfer delta-v values (m/s); data, not physics.
inline std::map<std::pair<std::string, std::string>, double> default_delta_v() {
  return {{{"Earth", "LEO"}, 9500.0}, {{"LEO", "EML1"}, 3770.0}, {{"EML1", "Moon"}, 2520.0},
          {{"LEO", "GEO"}, 4330.0},   {{"EML1", "GEO"}, 1380.0}};
}

/// The cislunar ISRU case: Earth, LEO, GEO, EML1, Moon; annual payload and oxygen demands; SWE/DWE plants.
inline ScenarioConfig builtin_cislunar_case(Variant variant, bool setup_phase) {
  ScenarioConfig c;
  c.name = std::string("cislunar_") + to_string(variant) + (setup_phase ? "_setup" : "");
  c.variant = variant;
  c.setup_phase = setup_phase;
  c.nodes = {{"Earth", "Earth", BodyKind::planet_surface_origin, {}},
             {"LEO", "Low Earth orbit", BodyKind::orbit, {}},
             {"GEO", "Geostationary orbit", BodyKind::orbit, {}},
             {"EML1", "Earth-Moon L1", BodyKind::orbit, {}},
             {"Moon", "Lunar surface", BodyKind::surface, {"SWE", "DWE"}}};
  if (variant == Variant::distributed) c.nodes[3].deployment_allowed = {"DWE"};
  auto dv = default_delta_v();
  c.arcs.push_back({"Earth", "LEO", dv[{"Earth", "LEO"}], 0, {}, ArcKind::launch});
  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{{"LEO", "EML1"}, {"EML1", "Moon"}, {"LEO", "GEO"}, {"EML1", "GEO"}}) {
    c.arcs.push_back({a, b, dv[{a, b}], 1, {}, ArcKind::transport});
    c.arcs.push_back({b, a, dv[{a, b}], 1, {}, ArcKind::transport});
  }
  auto cont = [](std::string id, std::string name) { return Commodity{id, name, CommodityClass::continuous, "kg", 1.0}; };
  c.commodities = {cont("payload", "Payload"), cont("oxygen", "Liquid oxygen"), cont("hydrogen", "Liquid hydrogen"),
                   cont("water", "Water"), cont("spares", "Maintenance spares"), cont("plant", "ISRU plant"),
                   cont("water_tank", "Water tank"), cont("prop_tank", "Propellant tank"),
                   Commodity{"spacecraft", "Spacecraft", CommodityClass::discrete, "count", 6000.0}};
  c.vehicle = VehicleSpec{};
  c.tanks = {{"water_tank", 40.0, {"water"}}, {"prop_tank", 1.478, {"oxygen", "hydrogen"}}};
  ScalingRule swe{10.5, 3000.0, 0.10, ScalingDirection::premium, std::nullopt};
  ScalingRule dwe{35.0, 3000.0, 0.10, ScalingDirection::premium, std::nullopt};
  ScalingRule cost{10000.0, 3000.0, 0.10, ScalingDirection::discount, FlatHead{1000.0, 10e6}};
  c.structures.push_back({"SWE", IsruKind::SWE, {swe, std::nullopt}, {cost, std::nullopt}, {"Moon"}, 0.05});
  std::vector<std::string> dwe_at = variant == Variant::concentrated ? std::vector<std::string>{"Moon"}
                                                                     : std::vector<std::string>{"Moon", "EML1"};
  c.structures.push_back({"DWE", IsruKind::DWE, {dwe, std::nullopt}, {cost, std::nullopt}, dwe_at, 0.05});
  c.demands = {{"GEO", "payload", -25000.0, std::nullopt},
               {"Moon", "payload", -15000.0, std::nullopt},
               {"GEO", "oxygen", -5000.0, std::nullopt},
               {"EML1", "oxygen", -5000.0, std::nullopt}};
  c.costs.launch_per_kg = 5000.0;
  c.costs.prices = {{"oxygen", 0.15}, {"hydrogen", 5.97}, {"water_tank", 800.0}, {"prop_tank", 1869.0}, {"spares", 10000.0}};
  c.costs.earth_supply = 1e9;
  if (!setup_phase) {
    if (variant == Variant::concentrated) c.options.initial_plant = {{"SWE", "Moon", 770.0}, {"DWE", "Moon", 230.0}};
    else c.options.initial_plant = {{"SWE", "Moon", 1000.0}};
  }
  return c;
}

inline const std::vector<std::string>& override_names() {
  static const std::vector<std::string> names = {"isru-productivity", "volume-discount", "cost-discount", "mass-interval", "mission-years"};
  return names;
}

inline ScenarioConfig apply_override(const ScenarioConfig& base, const std::string& name, double multiplier) {
  if (std::find(override_names().begin(), override_names().end(), name) == override_names().end())
    throw ValidationError("unknown override " + name);
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) throw ValidationError("override multiplier must be positive");
  ScenarioConfig c = base;
  auto need_rule = [&](PwlSource& p, const std::string& id) -> ScalingRule& {
    if (!p.rule) throw ValidationError("override " + name + " needs a scaling rule on structure " + id);
    return *p.rule;
  };
  for (auto& s : c.structures) {
    if (name == "isru-productivity") {
      if (s.sizing.rule) {
        s.sizing.rule->base_slope *= multiplier;
      } else if (s.sizing.table) {
        for (auto& a : s.sizing.table->slopes) a *= multiplier;
        for (auto& f : s.sizing.table->intercepts) f *= multiplier;
      }
    } else if (name == "volume-discount") {
      need_rule(s.sizing, s.id).rate *= multiplier;
    } else if (name == "cost-discount") {
      need_rule(s.cost, s.id).rate *= multiplier;
    } else if (name == "mass-interval") {
      need_rule(s.sizing, s.id).interval_width *= multiplier;
      need_rule(s.cost, s.id).interval_width *= multiplier;
    }
  }
  if (name == "mission-years") {
    double y = base.options.mission_years * multiplier;
    if (std::abs(y - std::round(y)) > 1e-6 || std::round(y) < 1) throw ValidationError("mission-years multiplier must give a whole number of years");
    c.options.mission_years = static_cast<int>(std::round(y));
  }
  if (multiplier != 1.0) {
    auto it = c.overrides.find(name);
    c.overrides[name] = (it == c.overrides.end() ? 1.0 : it->second) * multiplier;
  }
  validate_scenario(c);
  return c;
}

/// "builtin:<name>" selects a bundled case (cislunar_concentrated, cislunar_distributed_setup, ...); anything else is a file path.
inline ScenarioConfig load_scenario(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    std::string n = spec.substr(prefix.size());
    for (Variant v : {Variant::concentrated, Variant::distributed})
      for (bool s : {false, true})
        if (builtin_cislunar_case(v, s).name == n) return builtin_cislunar_case(v, s);
    throw ValidationError("unknown builtin scenario " + n);
  }
  std::ifstream in(spec);
  if (!in) throw ValidationError("cannot open scenario " + spec);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace isrulog
