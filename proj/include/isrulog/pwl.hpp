#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace isrulog {

/// Which way the slopes run. Cost curves are concave; productivity curves (mass -> output) are convex.
enum class Curvature { concave, convex };

/// Piecewise-linear function on [0, M^R] with value 0 at q = 0.
/// Segment r covers (breakpoints[r], breakpoints[r+1]] with value slopes[r]*q + intercepts[r].
struct PiecewiseLinear {
  std::vector<double> breakpoints{0.0};
  std::vector<double> slopes;
  std::vector<double> intercepts;
  /// First segment is a fixed-value plateau (slope 0), exempt from the curvature checks.
  bool flat_head = false;

  std::size_t intervals() const { return slopes.size(); }
  double domain_max() const { return breakpoints.back(); }
  double lower(std::size_t r) const { return breakpoints[r]; }
  double upper(std::size_t r) const { return breakpoints[r + 1]; }

  bool operator==(const PiecewiseLinear&) const = default;
};

/// Defects in a table; empty when it is a valid function of the given curvature.
inline std::vector<std::string> pwl_defects(const PiecewiseLinear& f, Curvature curv) {
  std::vector<std::string> out;
  const std::size_t R = f.slopes.size();
  if (R == 0) out.push_back("no intervals");
  if (f.breakpoints.size() != R + 1) out.push_back("breakpoint count must be interval count + 1");
  if (f.intercepts.size() != R) out.push_back("intercept count must equal interval count");
  if (!out.empty()) return out;
  if (f.breakpoints[0] != 0.0) out.push_back("first breakpoint must be 0");
  for (std::size_t r = 0; r < R; ++r) {
    if (!(f.breakpoints[r + 1] > f.breakpoints[r])) out.push_back("breakpoints not strictly increasing at " + std::to_string(r + 1));
    if (!std::isfinite(f.slopes[r]) || !std::isfinite(f.intercepts[r])) out.push_back("non-finite coefficient in interval " + std::to_string(r + 1));
  }
  if (f.flat_head && f.slopes[0] != 0.0) out.push_back("flat head must have slope 0");
  std::size_t first = f.flat_head ? 1 : 0;
  if (curv == Curvature::concave && first < R && f.intercepts[first] < 0.0 && !f.flat_head)
    out.push_back("first intercept negative");
  for (std::size_t r = first; r + 1 < R; ++r) {
    bool ok = curv == Curvature::concave ? f.slopes[r + 1] < f.slopes[r] : f.slopes[r + 1] > f.slopes[r];
    if (!ok) out.push_back("slopes not strictly " + std::string(curv == Curvature::concave ? "decreasing" : "increasing") + " at " + std::to_string(r + 2));
    bool icpt = curv == Curvature::concave ? f.intercepts[r + 1] >= f.intercepts[r] - 1e-9 * std::max(1.0, std::abs(f.intercepts[r]))
                                           : f.intercepts[r + 1] <= f.intercepts[r] + 1e-9 * std::max(1.0, std::abs(f.intercepts[r]));
    if (!icpt) out.push_back("intercepts out of order at " + std::to_string(r + 2));
  }
  for (std::size_t r = 0; r + 1 < R; ++r) {
    double m = f.breakpoints[r + 1];
    double a = f.slopes[r] * m + f.intercepts[r];
    double b = f.slopes[r + 1] * m + f.intercepts[r + 1];
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) out.push_back("discontinuous at breakpoint " + std::to_string(r + 1));
  }
  return out;
}

inline void validate_pwl(const PiecewiseLinear& f, Curvature curv) {
  auto d = pwl_defects(f, curv);
  if (!d.empty()) throw DomainError("piecewise-linear table: " + d.front());
}

/// Index (0-based) of the interval containing q, upper-inclusive; nullopt at q = 0.
inline std::optional<std::size_t> interval_of(const PiecewiseLinear& f, double q) {
  if (q < 0.0 || q > f.domain_max() || std::isnan(q))
    throw DomainError("quantity " + std::to_string(q) + " outside [0, " + std::to_string(f.domain_max()) + "]");
  if (q == 0.0) return std::nullopt;
  auto it = std::lower_bound(f.breakpoints.begin() + 1, f.breakpoints.end(), q);
  return static_cast<std::size_t>(it - f.breakpoints.begin()) - 1;
}

inline double eval(const PiecewiseLinear& f, double q) {
  auto r = interval_of(f, q);
  if (!r) return 0.0;
  return f.slopes[*r] * q + f.intercepts[*r];
}

enum class ScalingDirection { discount, premium };

struct FlatHead {
  double width = 0.0;
  double value = 0.0;
  bool operator==(const FlatHead&) const = default;
};

/// Generator parameters for tables of the form "base slope, changing by rate every width units".
struct ScalingRule {
  double base_slope = 0.0;
  double interval_width = 0.0;
  double rate = 0.0;
  ScalingDirection direction = ScalingDirection::discount;
  std::optional<FlatHead> flat_head;

  bool operator==(const ScalingRule&) const = default;
};

inline PiecewiseLinear from_scaling_rule(double base_slope, double interval_width, double rate,
                                         ScalingDirection direction, std::size_t n_intervals,
                                         std::optional<FlatHead> flat_head = std::nullopt) {
  if (!(base_slope > 0.0)) throw DomainError("base slope must be positive");
  if (!(interval_width > 0.0)) throw DomainError("interval width must be positive");
  if (!(rate >= 0.0 && rate < 1.0)) throw DomainError("rate must lie in [0, 1)");
  if (n_intervals < 1) throw DomainError("need at least one interval");
  PiecewiseLinear f;
  double start = 0.0, value = 0.0;
  if (flat_head) {
    if (!(flat_head->width > 0.0) || !(flat_head->value >= 0.0)) throw DomainError("flat head needs positive width and non-negative value");
    if (flat_head->width >= interval_width * static_cast<double>(n_intervals))
      throw DomainError("flat head covers the whole domain");
    f.flat_head = true;
    f.breakpoints.push_back(flat_head->width);
    f.slopes.push_back(0.0);
    f.intercepts.push_back(flat_head->value);
    start = flat_head->width;
    value = flat_head->value;
  }
  double sign = direction == ScalingDirection::discount ? -1.0 : 1.0;
  for (std::size_t r = 0; r < n_intervals; ++r) {
    double lo = std::max(start, interval_width * static_cast<double>(r));
    double hi = interval_width * static_cast<double>(r + 1);
    if (hi <= lo) continue;
    double s = base_slope * std::pow(1.0 + sign * rate, static_cast<double>(r));
    double icpt = value - s * lo;
    // Cancellation noise on a segment that starts on the line through the origin.
    if (std::abs(icpt) <= 1e-12 * std::max(std::abs(value), std::abs(s * lo))) icpt = 0.0;
    std::size_t last = f.slopes.size();
    bool merge = last > 0 && !(f.flat_head && last == 1) && f.slopes[last - 1] == s;
    if (merge) {
      f.breakpoints.back() = hi;
    } else {
      f.breakpoints.push_back(hi);
      f.slopes.push_back(s);
      f.intercepts.push_back(icpt);
    }
    value = s * hi + icpt;
  }
  return f;
}

/// Intervals needed for the rule to cover [0, max_quantity].
inline std::size_t intervals_to_cover(double interval_width, double max_quantity) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(max_quantity / interval_width - 1e-12)));
}

inline PiecewiseLinear from_scaling_rule(const ScalingRule& rule, double max_quantity) {
  return from_scaling_rule(rule.base_slope, rule.interval_width, rule.rate, rule.direction,
                           intervals_to_cover(rule.interval_width, max_quantity), rule.flat_head);
}

}  // namespace isrulog
