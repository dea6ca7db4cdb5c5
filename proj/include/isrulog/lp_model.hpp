#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

namespace isrulog {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary, integer };
enum class Sense { le, eq, ge };

inline const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::continuous: return "continuous";
    case VarKind::binary: return "binary";
    case VarKind::integer: return "integer";
  }
  return "?";
}

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::le: return "<=";
    case Sense::eq: return "=";
    case Sense::ge: return ">=";
  }
  return "?";
}

struct Variable {
  std::string label;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;

  bool is_integer() const { return kind != VarKind::continuous; }
};

struct Term {
  std::size_t var;
  double coef;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
  std::string label;

  double activity(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coef * x[t.var];
    return s;
  }
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Minimization MILP: variables with bounds and integrality, linear rows, linear objective.
class MilpModel {
 public:
  explicit MilpModel(std::string name = "model") : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  std::size_t add_variable(std::string label, VarKind kind, double lower, double upper,
                           double obj = 0.0) {
    if (kind == VarKind::binary) {
      lower = std::max(lower, 0.0);
      upper = std::min(upper, 1.0);
    }
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
      throw ValidationError("variable " + label + ": invalid bounds");
    if (label_index_.count(label)) throw ValidationError("duplicate variable label " + label);
    label_index_.emplace(label, vars_.size());
    vars_.push_back({std::move(label), kind, lower, upper});
    obj_.push_back(obj);
    return vars_.size() - 1;
  }

  /// Duplicate terms are merged and zero coefficients dropped; term order follows first appearance.
  std::size_t add_constraint(const std::vector<Term>& terms, Sense sense, double rhs,
                             std::string label) {
    LinearConstraint c;
    c.sense = sense;
    c.rhs = rhs;
    c.label = std::move(label);
    std::unordered_map<std::size_t, std::size_t> at;
    for (const auto& t : terms) {
      if (t.var >= vars_.size()) throw ValidationError("constraint " + c.label + ": unknown variable");
      if (!std::isfinite(t.coef)) throw ValidationError("constraint " + c.label + ": non-finite coefficient");
      auto it = at.find(t.var);
      if (it == at.end()) {
        at.emplace(t.var, c.terms.size());
        c.terms.push_back(t);
      } else {
        c.terms[it->second].coef += t.coef;
      }
    }
    std::erase_if(c.terms, [](const Term& t) { return t.coef == 0.0; });
    if (row_index_.count(c.label)) throw ValidationError("duplicate constraint label " + c.label);
    row_index_.emplace(c.label, rows_.size());
    rows_.push_back(std::move(c));
    return rows_.size() - 1;
  }

  void set_objective(std::size_t var, double coef) { obj_.at(var) = coef; }
  void add_objective(std::size_t var, double coef) { obj_.at(var) += coef; }
  void set_objective_constant(double c) { obj_const_ = c; }
  void add_objective_constant(double c) { obj_const_ += c; }

  void set_bounds(std::size_t var, double lower, double upper) {
    vars_.at(var).lower = lower;
    vars_.at(var).upper = upper;
  }
  void set_kind(std::size_t var, VarKind k) { vars_.at(var).kind = k; }
  void set_rhs(std::size_t row, double rhs) { rows_.at(row).rhs = rhs; }

  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(std::size_t j) const { return vars_.at(j); }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }
  const LinearConstraint& constraint(std::size_t i) const { return rows_.at(i); }
  const std::vector<double>& objective() const { return obj_; }
  double objective_constant() const { return obj_const_; }

  std::optional<std::size_t> find_variable(const std::string& label) const {
    auto it = label_index_.find(label);
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::size_t> find_constraint(const std::string& label) const {
    auto it = row_index_.find(label);
    if (it == row_index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t var_index(const std::string& label) const {
    auto v = find_variable(label);
    if (!v) throw ValidationError("no variable " + label);
    return *v;
  }

  bool has_integers() const {
    return std::any_of(vars_.begin(), vars_.end(), [](const Variable& v) { return v.is_integer(); });
  }

  double evaluate_objective(const std::vector<double>& x) const {
    double s = obj_const_;
    for (std::size_t j = 0; j < vars_.size(); ++j) s += obj_[j] * x[j];
    return s;
  }

  /// Copy with every integer variable made continuous.
  MilpModel relaxation() const {
    MilpModel r = *this;
    for (auto& v : r.vars_) v.kind = VarKind::continuous;
    return r;
  }

  void validate() const {
    for (const auto& v : vars_) {
      if (v.is_integer() && (!std::isfinite(v.lower) || !std::isfinite(v.upper)))
        throw ValidationError("integer variable " + v.label + " needs finite bounds");
    }
    for (const auto& r : rows_) {
      if (!std::isfinite(r.rhs)) throw ValidationError("constraint " + r.label + ": non-finite rhs");
      for (const auto& t : r.terms)
        if (t.var >= vars_.size()) throw ValidationError("constraint " + r.label + ": unknown variable");
    }
  }

  /// Deterministic text listing of the whole model, for diffing.
  std::string dump() const {
    std::ostringstream os;
    os << "model " << name_ << "\n";
    os << "variables " << vars_.size() << "\n";
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const auto& v = vars_[j];
      os << "  " << j << ' ' << v.label << ' ' << to_string(v.kind) << " [" << format_double(v.lower)
         << ", " << format_double(v.upper) << "]";
      if (obj_[j] != 0.0) os << " obj " << format_double(obj_[j]);
      os << "\n";
    }
    os << "constraints " << rows_.size() << "\n";
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& r = rows_[i];
      os << "  " << i << ' ' << r.label << ":";
      for (const auto& t : r.terms) os << ' ' << format_double(t.coef) << ' ' << vars_[t.var].label;
      os << ' ' << to_string(r.sense) << ' ' << format_double(r.rhs) << "\n";
    }
    os << "objective constant " << format_double(obj_const_) << "\n";
    return os.str();
  }

 private:
  std::string name_;
  std::vector<Variable> vars_;
  std::vector<double> obj_;
  double obj_const_ = 0.0;
  std::vector<LinearConstraint> rows_;
  std::unordered_map<std::string, std::size_t> label_index_;
  std::unordered_map<std::string, std::size_t> row_index_;
};

enum class SolveStatus { optimal, infeasible, unbounded, gap_limit, time_limit, node_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::gap_limit: return "gap-limit";
    case SolveStatus::time_limit: return "time-limit";
    case SolveStatus::node_limit: return "node-limit";
  }
  return "?";
}

/// CLI exit code convention: 0 optimal, 2 infeasible/unbounded, 3 limit hit.
inline int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return 0;
    case SolveStatus::infeasible:
    case SolveStatus::unbounded: return 2;
    default: return 3;
  }
}

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = kInf;
  std::vector<double> values;
  double bound = -kInf;
  double gap = kInf;
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double seconds = 0.0;
  /// (node count, objective) each time the incumbent improved.
  std::vector<std::pair<std::size_t, double>> incumbent_history;

  bool has_incumbent() const { return !values.empty(); }
};

inline double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInf;
  if (!std::isfinite(bound)) return kInf;
  double g = (incumbent - bound) / std::max(1.0, std::abs(incumbent));
  return std::max(0.0, g);
}

}  // namespace isrulog
