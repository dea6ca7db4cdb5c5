#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <queue>
#include <vector>

#include "feasibility.hpp"
#include "lp_model.hpp"
#include "simplex.hpp"

namespace isrulog {

struct MilpProgress {
  std::size_t nodes;
  std::size_t open;
  double incumbent;
  double bound;
  double seconds;
};

enum class Branching {
  /// Most fractional variable, ties broken by lowest index.
  most_fractional,
  /// Pseudocost product score; variables with fewer than `reliability` observations are strong-branched first.
  reliability,
};

struct MilpOptions {
  double gap_tol = 1e-6;
  double time_limit = kInf;
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();
  double int_tol = 1e-6;
  Branching branching = Branching::most_fractional;
  std::size_t reliability = 4;
  std::size_t strong_candidates = 8;
  std::size_t strong_iterations = 60;
  /// Fix integers at rounded LP values and re-solve, at the root and every `rounding_interval` nodes.
  bool rounding = true;
  std::size_t rounding_interval = 200;
  bool reduced_cost_fixing = true;
  /// Optional starting incumbent; ignored when infeasible.
  std::vector<double> initial_solution;
  LpOptions lp;
  std::function<void(const MilpProgress&)> log;
  std::size_t log_interval = 5000;
};

namespace bb_detail {

struct BoundChange {
  std::size_t var;
  double lo, hi;
};

struct Node {
  double bound;
  std::size_t id;
  std::vector<BoundChange> changes;
  std::shared_ptr<const std::vector<std::uint8_t>> basis;
  // Branching record used to learn pseudocosts once the node LP is solved.
  std::size_t bvar = static_cast<std::size_t>(-1);
  bool bup = false;
  double bfrac = 0.0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

struct Pseudocost {
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
};

}  // namespace bb_detail

/// Best-first branch-and-bound with depth-first plunging over the dual simplex.
inline Solution solve_milp(const MilpModel& model, MilpOptions opt = {}) {
  using namespace bb_detail;
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };
  model.validate();
  if (model.num_variables() == 0) throw ValidationError("model has no variables");

  Solution sol;
  const std::size_t n = model.num_variables();
  std::vector<std::size_t> ints;
  std::vector<double> root_lo(n), root_hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    root_lo[j] = v.lower;
    root_hi[j] = v.upper;
    if (v.is_integer()) {
      ints.push_back(j);
      root_lo[j] = std::ceil(v.lower - opt.int_tol);
      root_hi[j] = std::floor(v.upper + opt.int_tol);
      if (root_lo[j] > root_hi[j]) {
        sol.status = SolveStatus::infeasible;
        sol.seconds = elapsed();
        return sol;
      }
    }
  }

  LpSolver lp(model, opt.lp);
  const std::size_t base_iter_limit = opt.lp.max_iterations;
  for (auto j : ints) lp.set_bounds(j, root_lo[j], root_hi[j]);
  std::vector<double> cur_lo = root_lo, cur_hi = root_hi;

  double incumbent = kInf;
  auto abs_tol = [&](double inc) { return opt.gap_tol * std::max(1.0, std::abs(inc)); };

  auto accept = [&](std::vector<double> x, std::size_t nodes) {
    for (auto j : ints) x[j] = std::round(x[j]);
    auto rep = check_feasibility(model, x, 1e-6);
    if (!rep.feasible()) return false;
    double obj = model.evaluate_objective(x);
    if (obj < incumbent) {
      incumbent = obj;
      sol.values = std::move(x);
      sol.objective = obj;
      sol.incumbent_history.push_back({nodes, obj});
      return true;
    }
    return false;
  };

  auto set_var_bounds = [&](std::size_t j, double lo, double hi) {
    if (cur_lo[j] == lo && cur_hi[j] == hi) return;
    cur_lo[j] = lo;
    cur_hi[j] = hi;
    lp.set_bounds(j, lo, hi);
  };

  // Fix integers at given values, solve for the continuous part, restore everything.
  auto fix_and_solve = [&](const std::vector<double>& x, std::size_t nodes) {
    auto basis = lp.basis();
    auto lo = cur_lo, hi = cur_hi;
    bool ok = true;
    for (auto j : ints) {
      double v = std::round(x[j]);
      if (v < cur_lo[j] || v > cur_hi[j]) {
        ok = false;
        break;
      }
      set_var_bounds(j, v, v);
    }
    bool improved = false;
    if (ok) {
      auto r = lp.solve(incumbent);
      sol.lp_iterations += r.iterations;
      if (r.status == LpStatus::optimal) improved = accept(lp.primal(), nodes);
    }
    for (auto j : ints) set_var_bounds(j, lo[j], hi[j]);
    lp.set_basis(basis);
    return improved;
  };

  std::vector<Pseudocost> pc(n);
  double pc_total[2] = {0.0, 0.0};
  std::size_t pc_count[2] = {0, 0};
  auto learn = [&](std::size_t j, bool up, double per_unit) {
    per_unit = std::max(per_unit, 0.0);
    pc[j].sum[up] += per_unit;
    ++pc[j].count[up];
    pc_total[up] += per_unit;
    ++pc_count[up];
  };
  auto pc_value = [&](std::size_t j, bool up) {
    if (pc[j].count[up] > 0) return pc[j].sum[up] / static_cast<double>(pc[j].count[up]);
    return pc_count[up] > 0 ? pc_total[up] / static_cast<double>(pc_count[up]) : 1.0;
  };
  auto score = [](double down, double up) { return std::max(down, 1e-6) * std::max(up, 1e-6); };

  // Bound of the LP after tightening one variable, with a capped number of dual simplex pivots.
  // Returns +inf when the child is infeasible or cut off.
  auto probe = [&](std::size_t j, double lo, double hi, double cutoff,
                   const std::vector<std::uint8_t>& basis) {
    double olo = cur_lo[j], ohi = cur_hi[j];
    set_var_bounds(j, lo, hi);
    lp.options().max_iterations = opt.strong_iterations;
    auto r = lp.solve(cutoff);
    lp.options().max_iterations = base_iter_limit;
    sol.lp_iterations += r.iterations;
    double val;
    if (r.status == LpStatus::infeasible || r.status == LpStatus::cutoff) val = kInf;
    else if (r.status == LpStatus::optimal || r.status == LpStatus::iteration_limit) val = r.objective;
    else val = -kInf;
    set_var_bounds(j, olo, ohi);
    lp.set_basis(basis);
    return val;
  };

  if (!opt.initial_solution.empty() && opt.initial_solution.size() == n) accept(opt.initial_solution, 0);

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::size_t next_id = 0;
  std::size_t nodes = 0;
  double global_bound = -kInf;
  bool limit_hit = false;
  SolveStatus limit_status = SolveStatus::optimal;

  Node current{-kInf, next_id++, {}, nullptr};
  bool have_current = true;
  bool unbounded = false;
  bool gap_stop = false;
  double parent_obj = -kInf;

  while (have_current || !open.empty()) {
    if (!have_current) {
      current = open.top();
      open.pop();
      have_current = true;
      if (current.bound >= incumbent - abs_tol(incumbent)) {
        have_current = false;
        continue;
      }
      // Reset to root bounds plus this node's path.
      for (std::size_t j : ints) set_var_bounds(j, root_lo[j], root_hi[j]);
      for (const auto& c : current.changes) set_var_bounds(c.var, c.lo, c.hi);
      if (current.basis) lp.set_basis(*current.basis);
      parent_obj = current.bound;
    }
    double open_bound = open.empty() ? kInf : open.top().bound;
    global_bound = std::min(open_bound, current.bound);
    if (std::isfinite(incumbent) && relative_gap(incumbent, global_bound) <= opt.gap_tol) {
      gap_stop = true;
      have_current = false;
      while (!open.empty()) open.pop();
      break;
    }
    if (elapsed() > opt.time_limit) {
      limit_hit = true;
      limit_status = SolveStatus::time_limit;
      break;
    }
    if (nodes >= opt.node_limit) {
      limit_hit = true;
      limit_status = SolveStatus::node_limit;
      break;
    }
    ++nodes;
    lp.options().time_limit = std::isfinite(opt.time_limit) ? std::max(1.0, opt.time_limit - elapsed()) : kInf;
    double cutoff = std::isfinite(incumbent) ? incumbent - abs_tol(incumbent) : kInf;
    auto r = lp.solve(cutoff);
    sol.lp_iterations += r.iterations;
    if (r.status == LpStatus::time_limit) {
      limit_hit = true;
      limit_status = SolveStatus::time_limit;
      break;
    }
    if (r.status == LpStatus::unbounded) {
      if (nodes == 1) unbounded = true;
      have_current = false;
      if (unbounded) break;
      continue;
    }
    if (r.status != LpStatus::optimal) {
      if (r.status == LpStatus::iteration_limit && nodes == 1)
        throw NumericalError("root LP did not converge");
      have_current = false;
      continue;
    }
    double z = r.objective;
    if (current.bvar != static_cast<std::size_t>(-1) && std::isfinite(parent_obj)) {
      double dist = current.bup ? 1.0 - current.bfrac : current.bfrac;
      learn(current.bvar, current.bup, (z - parent_obj) / std::max(dist, 1e-6));
      current.bvar = static_cast<std::size_t>(-1);
    }
    current.bound = std::max(current.bound, z);
    if (z >= incumbent - abs_tol(incumbent)) {
      have_current = false;
      continue;
    }
    auto x = lp.primal();
    std::vector<std::size_t> frac;
    for (auto j : ints) {
      double f = x[j] - std::floor(x[j]);
      if (std::min(f, 1.0 - f) > opt.int_tol) frac.push_back(j);
    }
    if (frac.empty()) {
      if (!accept(x, nodes)) fix_and_solve(x, nodes);
      have_current = false;
      continue;
    }
    // Node duals must be read before the rounding heuristic re-solves the LP.
    auto d = lp.reduced_costs();
    if (opt.rounding && (nodes == 1 || nodes % opt.rounding_interval == 0)) fix_and_solve(x, nodes);
    // Reduced-cost tightening for the subtree.
    if (opt.reduced_cost_fixing && std::isfinite(incumbent)) {
      double slack = incumbent - z;
      for (auto j : ints) {
        if (d[j] == 0.0 || cur_lo[j] == cur_hi[j]) continue;
        if (d[j] > 1e-9 && std::abs(x[j] - cur_lo[j]) < 1e-9) {
          double nh = cur_lo[j] + std::floor(slack / d[j] + 1e-9);
          if (nh < cur_hi[j]) {
            set_var_bounds(j, cur_lo[j], nh);
            current.changes.push_back({j, cur_lo[j], nh});
          }
        } else if (d[j] < -1e-9 && std::abs(x[j] - cur_hi[j]) < 1e-9) {
          double nl = cur_hi[j] - std::floor(slack / -d[j] + 1e-9);
          if (nl > cur_lo[j]) {
            set_var_bounds(j, nl, cur_hi[j]);
            current.changes.push_back({j, nl, cur_hi[j]});
          }
        }
      }
    }

    std::size_t branch = n;
    if (opt.branching == Branching::most_fractional) {
      double best = 0.0;
      for (auto j : frac) {
        double f = x[j] - std::floor(x[j]);
        double dist = std::min(f, 1.0 - f);
        if (dist > best + 1e-12) {
          best = dist;
          branch = j;
        }
      }
    } else {
      // Rank by pseudocost score; strong-branch the unreliable leaders.
      std::vector<std::pair<double, std::size_t>> ranked;
      for (auto j : frac) {
        double f = x[j] - std::floor(x[j]);
        ranked.push_back({score(f * pc_value(j, false), (1.0 - f) * pc_value(j, true)), j});
      }
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      std::vector<std::uint8_t> basis_now;
      std::size_t probed = 0;
      bool node_done = false, tightened = false;
      double best = -1.0;
      for (auto [s, j] : ranked) {
        double f = x[j] - std::floor(x[j]);
        bool reliable = std::min(pc[j].count[0], pc[j].count[1]) >= opt.reliability;
        double sc = s;
        if (!reliable && probed < opt.strong_candidates) {
          if (basis_now.empty()) basis_now = lp.basis();
          ++probed;
          double zd = probe(j, cur_lo[j], std::floor(x[j]), cutoff, basis_now);
          double zu = probe(j, std::ceil(x[j]), cur_hi[j], cutoff, basis_now);
          if (std::isfinite(zd)) learn(j, false, (zd - z) / std::max(f, 1e-6));
          if (std::isfinite(zu)) learn(j, true, (zu - z) / std::max(1.0 - f, 1e-6));
          if (!std::isfinite(zd) && zd > 0 && !std::isfinite(zu) && zu > 0) {
            node_done = true;
            break;
          }
          if (!std::isfinite(zd) && zd > 0) {
            set_var_bounds(j, std::ceil(x[j]), cur_hi[j]);
            current.changes.push_back({j, cur_lo[j], cur_hi[j]});
            tightened = true;
            break;
          }
          if (!std::isfinite(zu) && zu > 0) {
            set_var_bounds(j, cur_lo[j], std::floor(x[j]));
            current.changes.push_back({j, cur_lo[j], cur_hi[j]});
            tightened = true;
            break;
          }
          sc = score(std::max(zd - z, 0.0), std::max(zu - z, 0.0));
        } else if (!reliable && probed >= opt.strong_candidates && branch != n) {
          continue;
        }
        if (sc > best) {
          best = sc;
          branch = j;
        }
      }
      if (node_done) {
        have_current = false;
        continue;
      }
      if (tightened) {
        // Re-solve the same node with the implied bound.
        parent_obj = z;
        --nodes;
        continue;
      }
    }

    double xv = x[branch];
    double fl = std::floor(xv), ce = std::ceil(xv);
    double fr = xv - fl;
    bool up_first = fr >= 0.5;
    auto basis = std::make_shared<const std::vector<std::uint8_t>>(lp.basis());
    Node down{z, 0, current.changes, basis, branch, false, fr};
    down.changes.push_back({branch, cur_lo[branch], fl});
    Node up{z, 0, current.changes, basis, branch, true, fr};
    up.changes.push_back({branch, ce, cur_hi[branch]});
    Node& dive = up_first ? up : down;
    Node& other = up_first ? down : up;
    other.id = next_id++;
    dive.id = next_id++;
    open.push(std::move(other));
    const auto& bc = dive.changes.back();
    set_var_bounds(bc.var, bc.lo, bc.hi);
    dive.basis = nullptr;
    current = std::move(dive);
    parent_obj = z;
    if (opt.log && nodes % opt.log_interval == 0)
      opt.log({nodes, open.size(), incumbent, std::min(open.empty() ? kInf : open.top().bound, current.bound), elapsed()});
  }

  sol.nodes = nodes;
  sol.seconds = elapsed();
  if (unbounded) {
    sol.status = SolveStatus::unbounded;
    return sol;
  }
  if (limit_hit) {
    double ob = open.empty() ? kInf : open.top().bound;
    if (have_current) ob = std::min(ob, current.bound);
    sol.bound = std::min(ob, incumbent);
    sol.status = limit_status;
    sol.gap = relative_gap(incumbent, sol.bound);
    return sol;
  }
  if (!sol.has_incumbent()) {
    sol.status = SolveStatus::infeasible;
    return sol;
  }
  // Gap-based stop keeps the open-node bound; an exhausted tree proves optimality up to the pruning tolerance.
  sol.bound = gap_stop ? std::min(incumbent, global_bound) : incumbent - abs_tol(incumbent);
  sol.gap = relative_gap(incumbent, sol.bound);
  sol.status = SolveStatus::optimal;
  return sol;
}

}  // namespace isrulog
