#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lp_model.hpp"

namespace isrulog {

struct Violation {
  enum class Kind { row, bound, integrality };
  Kind kind;
  std::size_t index;
  std::string label;
  /// Violation measured in the same scale the tolerance applies to.
  double amount;
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  double max_row = 0.0;
  double max_bound = 0.0;
  double max_integrality = 0.0;

  bool feasible() const { return violations.empty(); }
};

/// Row residuals are relative to max(1, |rhs|, sum |a_k x_k|); bounds relative to max(1, |bound|).
inline FeasibilityReport check_feasibility(const MilpModel& model, const std::vector<double>& x,
                                           double tol = 1e-6) {
  if (x.size() != model.num_variables()) throw ValidationError("value vector size mismatch");
  FeasibilityReport rep;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& v = model.variable(j);
    double b = 0.0;
    if (x[j] < v.lower) b = (v.lower - x[j]) / std::max(1.0, std::abs(v.lower));
    if (x[j] > v.upper) b = (x[j] - v.upper) / std::max(1.0, std::abs(v.upper));
    if (!std::isfinite(x[j])) b = kInf;
    rep.max_bound = std::max(rep.max_bound, b);
    if (b > tol) rep.violations.push_back({Violation::Kind::bound, j, v.label, b});
    if (v.is_integer()) {
      double f = std::abs(x[j] - std::round(x[j]));
      rep.max_integrality = std::max(rep.max_integrality, f);
      if (f > tol) rep.violations.push_back({Violation::Kind::integrality, j, v.label, f});
    }
  }
  for (std::size_t i = 0; i < model.num_constraints(); ++i) {
    const auto& r = model.constraint(i);
    double act = 0.0, mag = 0.0;
    for (const auto& t : r.terms) {
      act += t.coef * x[t.var];
      mag += std::abs(t.coef * x[t.var]);
    }
    double res = 0.0;
    if (r.sense != Sense::ge) res = std::max(res, act - r.rhs);
    if (r.sense != Sense::le) res = std::max(res, r.rhs - act);
    double rel = res / std::max({1.0, std::abs(r.rhs), mag});
    rep.max_row = std::max(rep.max_row, rel);
    if (rel > tol) rep.violations.push_back({Violation::Kind::row, i, r.label, rel});
  }
  return rep;
}

}  // namespace isrulog
