#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"

namespace isrulog {

inline constexpr double kStandardGravity = 9.80665;

enum class BodyKind { surface, orbit, planet_surface_origin };

struct NodeSpec {
  std::string id;
  std::string name;
  BodyKind body_kind = BodyKind::orbit;
  /// Structure kinds (e.g. "SWE", "DWE") that may be deployed here.
  std::set<std::string> deployment_allowed;

  bool operator==(const NodeSpec&) const = default;
};

enum class ArcKind { transport, launch, holdover };

struct ArcSpec {
  std::string origin;
  std::string dest;
  double delta_v = 0.0;
  int tof = 1;
  /// Admissible departure steps; empty means every step.
  std::set<int> windows;
  ArcKind kind = ArcKind::transport;

  bool operator==(const ArcSpec&) const = default;
};

enum class CommodityClass { continuous, discrete };

struct Commodity {
  std::string id;
  std::string name;
  CommodityClass cls = CommodityClass::continuous;
  std::string unit = "kg";
  /// Mass in kg of one unit; 1 for mass commodities, the dry mass for vehicle counts.
  double unit_mass = 1.0;

  bool operator==(const Commodity&) const = default;
};

/// Fixed-design vehicle class. Its count travels as the discrete commodity `count_commodity`.
struct VehicleSpec {
  std::string id = "spacecraft";
  std::string count_commodity = "spacecraft";
  double isp = 420.0;
  double dry_mass = 6000.0;
  double propellant_capacity = 65000.0;
  /// Non-propellant cargo limit per vehicle; infinite means no payload row.
  double payload_capacity = std::numeric_limits<double>::infinity();
  int available_per_window = 2;
  double manufacturing_cost = 150e6;
  double flight_cost = 0.5e6;

  bool operator==(const VehicleSpec&) const = default;
};

/// Fixed commodity ids the transformations refer to.
struct CommodityRoles {
  std::string oxygen = "oxygen";
  std::string hydrogen = "hydrogen";
  std::string water = "water";
  /// Oxidizer-to-fuel mixture ratio of the engines.
  double mixture_ratio = 5.5;
};

using TransformationMatrix = Eigen::MatrixXd;

inline std::size_t commodity_index(const std::vector<Commodity>& order, const std::string& id) {
  for (std::size_t k = 0; k < order.size(); ++k)
    if (order[k].id == id) return k;
  throw ValidationError("unknown commodity " + id);
}

/// Fraction of departing mass burned on a maneuver: 1 - exp(-dv / (g0 isp)).
inline double burn_fraction(double delta_v, double isp) {
  if (!(isp > 0.0)) throw DomainError("isp must be positive");
  if (!(delta_v >= 0.0)) throw DomainError("delta-v must be non-negative");
  return -std::expm1(-delta_v / (kStandardGravity * isp));
}

/// Arriving = Q * departing. The burn removes burn_fraction of the departing mass, split
/// between oxygen and hydrogen at the mixture ratio. The extra last component is untouched.
inline TransformationMatrix burn_transformation(double delta_v, double isp, const std::vector<Commodity>& order,
                                                const CommodityRoles& roles = {}) {
  const auto n = static_cast<Eigen::Index>(order.size());
  TransformationMatrix Q = TransformationMatrix::Identity(n + 1, n + 1);
  double phi = burn_fraction(delta_v, isp);
  if (phi == 0.0) return Q;
  auto ox = static_cast<Eigen::Index>(commodity_index(order, roles.oxygen));
  auto fu = static_cast<Eigen::Index>(commodity_index(order, roles.hydrogen));
  double share_ox = roles.mixture_ratio / (roles.mixture_ratio + 1.0);
  double share_fu = 1.0 / (roles.mixture_ratio + 1.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    double m = order[static_cast<std::size_t>(k)].unit_mass;
    Q(ox, k) -= phi * share_ox * m;
    Q(fu, k) -= phi * share_fu * m;
  }
  return Q;
}

enum class IsruKind { SWE, DWE };

inline const char* to_string(IsruKind k) { return k == IsruKind::SWE ? "SWE" : "DWE"; }

inline IsruKind parse_isru_kind(const std::string& s) {
  if (s == "SWE") return IsruKind::SWE;
  if (s == "DWE") return IsruKind::DWE;
  throw ValidationError("unknown ISRU kind " + s);
}

/// Processing map of one ISRU step. Index |C| (the extra component) is the regolith feed.
/// SWE turns feed into water; DWE splits water into 8/9 oxygen and 1/9 hydrogen by mass.
inline TransformationMatrix isru_transformation(IsruKind kind, const std::vector<Commodity>& order,
                                                bool regolith = true, const CommodityRoles& roles = {}) {
  const auto n = static_cast<Eigen::Index>(order.size());
  TransformationMatrix Q = TransformationMatrix::Zero(n + 1, n + 1);
  auto w = static_cast<Eigen::Index>(commodity_index(order, roles.water));
  if (kind == IsruKind::SWE) {
    if (regolith) Q(w, n) = 1.0;
  } else {
    Q(static_cast<Eigen::Index>(commodity_index(order, roles.oxygen)), w) = 8.0 / 9.0;
    Q(static_cast<Eigen::Index>(commodity_index(order, roles.hydrogen)), w) = 1.0 / 9.0;
  }
  return Q;
}

/// Capacity coupling H x <= C x for one vehicle on one arc. Row k reads
/// sum_c H(k,c) x_c - sum_c C(k,c) x_c <= 0; C carries per-unit capacities (vehicle count, tank mass).
struct ConcurrencyMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd H;
  Eigen::MatrixXd C;
};

struct TankSpec {
  std::string commodity;
  /// kg of contents held per kg of tank.
  double capacity_ratio = 0.0;
  /// Commodities the tank can hold.
  std::vector<std::string> holds;

  bool operator==(const TankSpec&) const = default;
};

/// Rows: propellant (oxygen + hydrogen), one per tank type, payload when the vehicle has a finite limit.
/// Propellant tanks add to the propellant row; other tanks get their own row.
inline ConcurrencyMatrix concurrency_matrix(const VehicleSpec& v, const std::vector<Commodity>& order,
                                            const std::vector<TankSpec>& tanks, const CommodityRoles& roles = {}) {
  const auto n = static_cast<Eigen::Index>(order.size());
  std::vector<Eigen::VectorXd> hs, cs;
  ConcurrencyMatrix m;
  auto idx = [&](const std::string& id) { return static_cast<Eigen::Index>(commodity_index(order, id)); };
  auto sc = idx(v.count_commodity);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n), c = Eigen::VectorXd::Zero(n);
  h[idx(roles.oxygen)] = 1.0;
  h[idx(roles.hydrogen)] = 1.0;
  c[sc] = v.propellant_capacity;
  std::set<std::string> tank_ids;
  for (const auto& t : tanks) {
    tank_ids.insert(t.commodity);
    bool prop = std::find(t.holds.begin(), t.holds.end(), roles.oxygen) != t.holds.end();
    if (prop) c[idx(t.commodity)] += t.capacity_ratio;
  }
  m.names.push_back("propellant");
  hs.push_back(h);
  cs.push_back(c);
  for (const auto& t : tanks) {
    bool prop = std::find(t.holds.begin(), t.holds.end(), roles.oxygen) != t.holds.end();
    if (prop) continue;
    Eigen::VectorXd ht = Eigen::VectorXd::Zero(n), ct = Eigen::VectorXd::Zero(n);
    for (const auto& held : t.holds) ht[idx(held)] = 1.0;
    ct[idx(t.commodity)] = t.capacity_ratio;
    m.names.push_back(t.commodity);
    hs.push_back(ht);
    cs.push_back(ct);
  }
  if (std::isfinite(v.payload_capacity)) {
    Eigen::VectorXd hp = Eigen::VectorXd::Zero(n), cp = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& id = order[static_cast<std::size_t>(k)].id;
      if (k == sc || id == roles.oxygen || id == roles.hydrogen) continue;
      hp[k] = 1.0;
    }
    cp[sc] = v.payload_capacity;
    m.names.push_back("payload");
    hs.push_back(hp);
    cs.push_back(cp);
  }
  m.H.resize(static_cast<Eigen::Index>(hs.size()), n);
  m.C.resize(static_cast<Eigen::Index>(hs.size()), n);
  for (std::size_t k = 0; k < hs.size(); ++k) {
    m.H.row(static_cast<Eigen::Index>(k)) = hs[k].transpose();
    m.C.row(static_cast<Eigen::Index>(k)) = cs[k].transpose();
  }
  return m;
}

/// One flow-variable slot: departures along `arc` at step t. Holdover slots have vehicle = -1.
struct Slot {
  std::size_t arc;
  int t;
  int vehicle;
};

struct TimeExpandedNetwork {
  std::vector<NodeSpec> nodes;
  /// Input arcs followed by one generated holdover arc per node.
  std::vector<ArcSpec> arcs;
  int horizon = 0;
  std::size_t vehicle_count = 1;
  std::vector<Slot> slots;
  std::vector<std::string> warnings;

  std::size_t node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].id == id) return i;
    throw ValidationError("unknown node " + id);
  }
  bool has_node(const std::string& id) const {
    return std::any_of(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
  }
  const NodeSpec& node(const std::string& id) const { return nodes[node_index(id)]; }
};

inline bool window_open(const ArcSpec& a, int t) { return a.windows.empty() || a.windows.count(t) > 0; }

/// Time points run 0..horizon. A slot exists for every departure t in the arc's windows with
/// t + tof <= horizon; holdovers are generated at every node for t = 0..horizon-1.
inline TimeExpandedNetwork build_time_expanded_graph(const std::vector<NodeSpec>& nodes, const std::vector<ArcSpec>& arcs,
                                                     int horizon, std::size_t vehicle_count = 1) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1 step");
  TimeExpandedNetwork net;
  net.nodes = nodes;
  net.horizon = horizon;
  net.vehicle_count = vehicle_count;
  std::set<std::string> ids;
  for (const auto& n : nodes)
    if (!ids.insert(n.id).second) throw ValidationError("duplicate node id " + n.id);
  for (const auto& a : arcs) {
    if (!ids.count(a.origin)) throw ValidationError("arc references unknown node " + a.origin);
    if (!ids.count(a.dest)) throw ValidationError("arc references unknown node " + a.dest);
    if (a.kind == ArcKind::holdover) throw ValidationError("holdover arcs are generated, not declared");
    if (a.tof > horizon) {
      net.warnings.push_back("arc " + a.origin + "->" + a.dest + " dropped: time of flight exceeds horizon");
      continue;
    }
    net.arcs.push_back(a);
  }
  for (const auto& n : nodes) net.arcs.push_back({n.id, n.id, 0.0, 1, {}, ArcKind::holdover});
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    const auto& a = net.arcs[k];
    for (int t = 0; t + a.tof <= horizon; ++t) {
      if (a.kind == ArcKind::holdover) {
        if (t < horizon) net.slots.push_back({k, t, -1});
        continue;
      }
      if (!window_open(a, t)) continue;
      for (std::size_t v = 0; v < vehicle_count; ++v) net.slots.push_back({k, t, static_cast<int>(v)});
    }
  }
  return net;
}

struct NetworkDefect {
  std::string kind;
  std::string message;
};

/// Diagnostics only. `demand_nodes` lists nodes that must be reachable from a launch origin.
inline std::vector<NetworkDefect> validate_network(const TimeExpandedNetwork& net,
                                                   const std::vector<std::string>& demand_nodes = {}) {
  std::vector<NetworkDefect> out;
  std::set<std::string> ids;
  for (const auto& n : net.nodes) ids.insert(n.id);
  bool origin = false;
  for (const auto& n : net.nodes) origin |= n.body_kind == BodyKind::planet_surface_origin;
  if (!origin) out.push_back({"no launch origin", "no node is flagged as the launch origin"});
  for (const auto& a : net.arcs) {
    std::string name = a.origin + "->" + a.dest;
    if (!ids.count(a.origin) || !ids.count(a.dest)) out.push_back({"dangling arc", name});
    if (a.delta_v < 0.0) out.push_back({"negative delta-v", name});
    if (a.kind == ArcKind::transport && a.tof < 1) out.push_back({"transport arc with tof < 1", name});
    if (a.kind == ArcKind::holdover && (a.tof != 1 || a.delta_v != 0.0)) out.push_back({"bad holdover", name});
    if (a.kind != ArcKind::holdover && a.origin == a.dest) out.push_back({"self loop", name});
    for (int w : a.windows)
      if (w < 0 || w > net.horizon) out.push_back({"window outside horizon", name + " window " + std::to_string(w)});
  }
  std::set<std::string> reach;
  std::queue<std::string> todo;
  for (const auto& n : net.nodes)
    if (n.body_kind == BodyKind::planet_surface_origin) {
      reach.insert(n.id);
      todo.push(n.id);
    }
  while (!todo.empty()) {
    auto u = todo.front();
    todo.pop();
    for (const auto& a : net.arcs)
      if (a.origin == u && a.kind != ArcKind::holdover && reach.insert(a.dest).second) todo.push(a.dest);
  }
  for (const auto& d : demand_nodes)
    if (!reach.count(d)) out.push_back({"unreachable demand", d});
  return out;
}

/// Earliest time point at which each node can hold cargo launched at t = 0.
inline std::map<std::string, int> earliest_arrival(const TimeExpandedNetwork& net) {
  std::map<std::string, int> best;
  using Item = std::pair<int, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& n : net.nodes)
    if (n.body_kind == BodyKind::planet_surface_origin) {
      best[n.id] = 0;
      pq.push({0, n.id});
    }
  while (!pq.empty()) {
    auto [t, u] = pq.top();
    pq.pop();
    if (best[u] < t) continue;
    for (const auto& a : net.arcs) {
      if (a.origin != u || a.kind == ArcKind::holdover) continue;
      int d = t;
      while (d + a.tof <= net.horizon && !window_open(a, d)) ++d;
      if (d + a.tof > net.horizon) continue;
      int arr = d + a.tof;
      auto it = best.find(a.dest);
      if (it == best.end() || arr < it->second) {
        best[a.dest] = arr;
        pq.push({arr, a.dest});
      }
    }
  }
  return best;
}

}  // namespace isrulog
