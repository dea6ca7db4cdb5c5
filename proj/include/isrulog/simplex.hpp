#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "errors.hpp"
#include "lp_model.hpp"

namespace isrulog {

struct LpOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-7;
  std::size_t max_iterations = 500000;
  std::size_t refactor_interval = 100;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_limit = 300;
  bool scale = true;
  bool force_bland = false;
  double time_limit = kInf;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, cutoff, time_limit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
    case LpStatus::cutoff: return "cutoff";
    case LpStatus::time_limit: return "time-limit";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = kInf;
  std::size_t iterations = 0;
};

/// Bounded revised simplex (dual and primal) on  A x - r = 0,  l <= (x, r) <= u.
/// The basis is kept as a sparse LU of a reference basis plus a product-form eta file.
/// Bounds of structural variables can be changed between solves; the last basis is reused.
class LpSolver {
 public:
  enum Status : std::uint8_t { kBasic = 0, kLower = 1, kUpper = 2, kFree = 3 };

  explicit LpSolver(const MilpModel& model, LpOptions opt = {}) : opt_(opt) {
    n_ = model.num_variables();
    m_ = model.num_constraints();
    N_ = n_ + m_;
    load(model);
    reset_basis();
  }

  std::size_t num_cols() const { return n_; }
  std::size_t num_rows() const { return m_; }
  const LpOptions& options() const { return opt_; }
  LpOptions& options() { return opt_; }

  double lower(std::size_t j) const { return lb_[j] * cscale_[j]; }
  double upper(std::size_t j) const { return ub_[j] * cscale_[j]; }

  void set_bounds(std::size_t j, double lo, double hi) {
    lb_[j] = lo / cscale_[j];
    ub_[j] = hi / cscale_[j];
    if (status_[j] != kBasic) place_nonbasic(j);
  }

  /// All-logical starting basis.
  void reset_basis() {
    head_.resize(m_);
    pos_.assign(N_, -1);
    status_.assign(N_, kLower);
    x_.assign(N_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = static_cast<int>(i);
      status_[n_ + i] = kBasic;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (c_[j] >= 0 && std::isfinite(lb_[j])) status_[j] = kLower;
      else if (c_[j] <= 0 && std::isfinite(ub_[j])) status_[j] = kUpper;
      else if (std::isfinite(lb_[j])) status_[j] = kLower;
      else if (std::isfinite(ub_[j])) status_[j] = kUpper;
      else status_[j] = kFree;
      place_nonbasic(j);
    }
    factored_ = false;
    weights_.assign(m_, 1.0);
  }

  std::vector<std::uint8_t> basis() const { return status_; }

  void set_basis(const std::vector<std::uint8_t>& st) {
    if (st.size() != N_) throw ValidationError("basis size mismatch");
    std::size_t nb = 0;
    for (auto s : st) nb += (s == kBasic);
    if (nb != m_) throw ValidationError("basis has wrong number of basic variables");
    status_ = st;
    std::size_t k = 0;
    pos_.assign(N_, -1);
    for (std::size_t j = 0; j < N_; ++j) {
      if (status_[j] == kBasic) {
        head_[k] = j;
        pos_[j] = static_cast<int>(k++);
      } else {
        place_nonbasic(j);
      }
    }
    factored_ = false;
    weights_.assign(m_, 1.0);
  }

  bool is_basic(std::size_t j) const { return status_[j] == kBasic; }

  LpResult solve(double cutoff = kInf) {
    start_ = std::chrono::steady_clock::now();
    iters_ = 0;
    cutoff_scaled_ = std::isfinite(cutoff) ? (cutoff - obj_const_) * objscale_ : kInf;
    LpResult res;
    if (m_ == 0) {
      res = solve_trivial();
      return res;
    }
    const double pivot_tol = opt_.pivot_tol;
    bool done = false;
    for (int attempt = 0; attempt < 4 && !done; ++attempt) {
      // Later retries demand larger pivots.
      opt_.pivot_tol = attempt >= 2 ? pivot_tol * 100.0 : pivot_tol;
      if (!factored_ && !refactor()) {
        reset_basis();
        if (!refactor()) throw NumericalError("cannot factor the all-logical basis");
      }
      for (std::size_t j = 0; j < N_; ++j)
        if (status_[j] != kBasic) place_nonbasic(j);
      compute_primal();
      compute_duals();
      flip_to_dual_feasible();
      LpStatus st;
      if (dual_infeasibility() <= opt_.dual_tol) {
        st = dual_simplex();
        if (st == LpStatus::optimal && dual_infeasibility() > opt_.dual_tol) st = primal_simplex();
      } else {
        st = primal_simplex();
      }
      if (st == LpStatus::iteration_limit && numerical_trouble_) {
        numerical_trouble_ = false;
        factored_ = false;
        continue;
      }
      if (st == LpStatus::optimal) {
        // Re-verify with a fresh factorization; continue iterating if drift appeared.
        if (!refactor()) {
          factored_ = false;
          continue;
        }
        compute_primal();
        compute_duals();
        if (primal_infeasibility() > opt_.primal_tol * 10 || dual_infeasibility() > opt_.dual_tol * 10) {
          if (attempt < 3) continue;
        }
      }
      res.status = st;
      done = true;
    }
    opt_.pivot_tol = pivot_tol;
    if (!done) throw NumericalError("simplex failed after repeated refactorization");
    res.iterations = iters_;
    res.objective = objective();
    total_iterations_ += iters_;
    return res;
  }

  /// Objective value of the current basic solution in model units (includes constant).
  double objective() const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += c_[j] * x_[j];
    return s / objscale_ + obj_const_;
  }

  std::vector<double> primal() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = x_[j] * cscale_[j];
    return x;
  }

  /// Reduced costs of structural variables in model units.
  std::vector<double> reduced_costs() const {
    std::vector<double> d(n_);
    for (std::size_t j = 0; j < n_; ++j) d[j] = status_[j] == kBasic ? 0.0 : d_[j] / (cscale_[j] * objscale_);
    return d;
  }

  /// Row activities in model units.
  std::vector<double> row_activity() const {
    std::vector<double> r(m_);
    for (std::size_t i = 0; i < m_; ++i) r[i] = x_[n_ + i] / rscale_[i];
    return r;
  }

  std::size_t total_iterations() const { return total_iterations_; }

 private:
  struct Eta {
    int p;
    double pivot;
    std::vector<std::pair<int, double>> entries;
  };

  using SpMat = Eigen::SparseMatrix<double>;
  using Vec = Eigen::VectorXd;

  static constexpr double kNegligible = 1e-9;

  void load(const MilpModel& model) {
    const auto& rows = model.constraints();
    // Row-wise copy for scaling.
    std::vector<std::vector<std::pair<std::size_t, double>>> rw(m_);
    for (std::size_t i = 0; i < m_; ++i)
      for (const auto& t : rows[i].terms) rw[i].push_back({t.var, t.coef});
    cscale_.assign(n_, 1.0);
    rscale_.assign(m_, 1.0);
    if (opt_.scale && m_ > 0) {
      std::vector<double> cmin(n_), cmax(n_);
      for (int pass = 0; pass < 6; ++pass) {
        // Entries below kNegligible of the largest one in their row or column do not steer the scale.
        for (std::size_t i = 0; i < m_; ++i) {
          double lo = kInf, hi = 0;
          for (auto [j, a] : rw[i]) hi = std::max(hi, std::abs(a) * cscale_[j]);
          for (auto [j, a] : rw[i]) {
            double v = std::abs(a) * cscale_[j];
            if (v >= kNegligible * hi) lo = std::min(lo, v);
          }
          if (hi > 0) rscale_[i] = pow2(1.0 / std::sqrt(lo * hi));
        }
        std::fill(cmin.begin(), cmin.end(), kInf);
        std::fill(cmax.begin(), cmax.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i)
          for (auto [j, a] : rw[i]) cmax[j] = std::max(cmax[j], std::abs(a) * rscale_[i]);
        for (std::size_t i = 0; i < m_; ++i)
          for (auto [j, a] : rw[i]) {
            double v = std::abs(a) * rscale_[i];
            if (v >= kNegligible * cmax[j]) cmin[j] = std::min(cmin[j], v);
          }
        for (std::size_t j = 0; j < n_; ++j)
          if (cmax[j] > 0) cscale_[j] = pow2(1.0 / std::sqrt(cmin[j] * cmax[j]));
      }
    }
    // Column-major storage of the scaled structural matrix.
    std::vector<std::size_t> cnt(n_ + 1, 0);
    for (std::size_t i = 0; i < m_; ++i)
      for (auto [j, a] : rw[i]) ++cnt[j + 1];
    for (std::size_t j = 0; j < n_; ++j) cnt[j + 1] += cnt[j];
    cstart_ = cnt;
    rowidx_.resize(cnt[n_]);
    val_.resize(cnt[n_]);
    std::vector<std::size_t> fill(cstart_.begin(), cstart_.end() - 1);
    for (std::size_t i = 0; i < m_; ++i)
      for (auto [j, a] : rw[i]) {
        rowidx_[fill[j]] = static_cast<int>(i);
        val_[fill[j]++] = a * rscale_[i] * cscale_[j];
      }
    c_.assign(N_, 0.0);
    lb_.assign(N_, 0.0);
    ub_.assign(N_, 0.0);
    double cmaxabs = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      c_[j] = model.objective()[j] * cscale_[j];
      cmaxabs = std::max(cmaxabs, std::abs(c_[j]));
      lb_[j] = model.variable(j).lower / cscale_[j];
      ub_[j] = model.variable(j).upper / cscale_[j];
    }
    objscale_ = cmaxabs > 0 ? pow2(1.0 / cmaxabs) : 1.0;
    if (!opt_.scale) objscale_ = 1.0;
    for (std::size_t j = 0; j < n_; ++j) c_[j] *= objscale_;
    obj_const_ = model.objective_constant();
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& r = rows[i];
      double lo = -kInf, hi = kInf;
      if (r.sense == Sense::le) hi = r.rhs;
      else if (r.sense == Sense::ge) lo = r.rhs;
      else lo = hi = r.rhs;
      lb_[n_ + i] = lo * rscale_[i];
      ub_[n_ + i] = hi * rscale_[i];
    }
  }

  static double pow2(double v) {
    if (!std::isfinite(v) || v <= 0) return 1.0;
    return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(v))));
  }

  LpResult solve_trivial() {
    LpResult res;
    for (std::size_t j = 0; j < n_; ++j) {
      if (c_[j] > 0) {
        if (!std::isfinite(lb_[j])) { res.status = LpStatus::unbounded; return res; }
        x_[j] = lb_[j];
      } else if (c_[j] < 0) {
        if (!std::isfinite(ub_[j])) { res.status = LpStatus::unbounded; return res; }
        x_[j] = ub_[j];
      } else {
        x_[j] = std::isfinite(lb_[j]) ? lb_[j] : (std::isfinite(ub_[j]) ? ub_[j] : 0.0);
      }
      d_.assign(N_, 0.0);
    }
    d_ = c_;
    res.status = LpStatus::optimal;
    res.objective = objective();
    return res;
  }

  void place_nonbasic(std::size_t j) {
    bool hasl = std::isfinite(lb_[j]), hasu = std::isfinite(ub_[j]);
    if (status_[j] == kLower && !hasl) status_[j] = hasu ? kUpper : kFree;
    if (status_[j] == kUpper && !hasu) status_[j] = hasl ? kLower : kFree;
    if (status_[j] == kFree && (hasl || hasu)) status_[j] = hasl ? kLower : kUpper;
    switch (status_[j]) {
      case kLower: x_[j] = lb_[j]; break;
      case kUpper: x_[j] = ub_[j]; break;
      default: x_[j] = 0.0; break;
    }
  }

  // Column j of [A  -I] added (times s) into dense v.
  void add_column(std::size_t j, double s, Vec& v) const {
    if (j < n_) {
      for (std::size_t k = cstart_[j]; k < cstart_[j + 1]; ++k) v[rowidx_[k]] += s * val_[k];
    } else {
      v[j - n_] -= s;
    }
  }

  double dot_column(std::size_t j, const Vec& y) const {
    if (j < n_) {
      double s = 0.0;
      for (std::size_t k = cstart_[j]; k < cstart_[j + 1]; ++k) s += y[rowidx_[k]] * val_[k];
      return s;
    }
    return -y[j - n_];
  }

  bool refactor() {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m_ * 3);
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t j = head_[k];
      if (j < n_) {
        for (std::size_t e = cstart_[j]; e < cstart_[j + 1]; ++e)
          trip.emplace_back(rowidx_[e], static_cast<int>(k), val_[e]);
      } else {
        trip.emplace_back(static_cast<int>(j - n_), static_cast<int>(k), -1.0);
      }
    }
    SpMat B(static_cast<int>(m_), static_cast<int>(m_));
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    lu_ = std::make_unique<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>>();
    lu_->analyzePattern(B);
    lu_->factorize(B);
    etas_.clear();
    factored_ = lu_->info() == Eigen::Success;
    if (factored_) {
      // Reject numerically singular factors.
      Vec probe = Vec::Ones(static_cast<Eigen::Index>(m_));
      Vec y = lu_->solve(probe);
      if (!y.allFinite()) factored_ = false;
    }
    return factored_;
  }

  Vec ftran(Vec v) const {
    Vec y = lu_->solve(v);
    for (const auto& e : etas_) {
      double yp = y[e.p] / e.pivot;
      y[e.p] = yp;
      if (yp != 0.0)
        for (auto [i, a] : e.entries) y[i] -= a * yp;
    }
    return y;
  }

  Vec btran(Vec z) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = z[it->p];
      for (auto [i, a] : it->entries) s -= a * z[i];
      z[it->p] = s / it->pivot;
    }
    return lu_->transpose().solve(z);
  }

  // Replace basic variable at position r by column alpha (= B^{-1} a_q).
  bool update_basis(std::size_t r, std::size_t q, const Vec& alpha) {
    std::size_t leave = head_[r];
    head_[r] = q;
    pos_[q] = static_cast<int>(r);
    pos_[leave] = -1;
    status_[q] = kBasic;
    if (etas_.size() + 1 >= opt_.refactor_interval) {
      if (!refactor()) return false;
      compute_primal();
      compute_duals();
      return true;
    }
    Eta e;
    e.p = static_cast<int>(r);
    e.pivot = alpha[r];
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
      if (i != static_cast<Eigen::Index>(r) && alpha[i] != 0.0) e.entries.emplace_back(static_cast<int>(i), alpha[i]);
    etas_.push_back(std::move(e));
    return true;
  }

  void compute_primal() {
    Vec rhs = Vec::Zero(static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < N_; ++j)
      if (status_[j] != kBasic && x_[j] != 0.0) add_column(j, -x_[j], rhs);
    Vec xb = ftran(rhs);
    for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] = xb[k];
  }

  void compute_duals() {
    Vec cb(static_cast<Eigen::Index>(m_));
    for (std::size_t k = 0; k < m_; ++k) cb[k] = c_[head_[k]];
    y_ = btran(cb);
    d_.assign(N_, 0.0);
    for (std::size_t j = 0; j < N_; ++j)
      if (status_[j] != kBasic) d_[j] = c_[j] - dot_column(j, y_);
  }

  double infeas_of(std::size_t j) const {
    if (x_[j] < lb_[j] - opt_.primal_tol) return lb_[j] - x_[j];
    if (x_[j] > ub_[j] + opt_.primal_tol) return x_[j] - ub_[j];
    return 0.0;
  }

  double primal_infeasibility() const {
    double s = 0.0;
    for (std::size_t k = 0; k < m_; ++k) s = std::max(s, infeas_of(head_[k]));
    return s;
  }

  double dual_infeas_of(std::size_t j) const {
    switch (status_[j]) {
      case kLower: return lb_[j] == ub_[j] ? 0.0 : std::max(0.0, -d_[j]);
      case kUpper: return lb_[j] == ub_[j] ? 0.0 : std::max(0.0, d_[j]);
      case kFree: return std::abs(d_[j]);
      default: return 0.0;
    }
  }

  double dual_infeasibility() const {
    double s = 0.0;
    for (std::size_t j = 0; j < N_; ++j)
      if (status_[j] != kBasic) s = std::max(s, dual_infeas_of(j));
    return s;
  }

  // Move boxed nonbasic variables with wrong-signed reduced cost to the other bound.
  bool flip_to_dual_feasible() {
    Vec delta = Vec::Zero(static_cast<Eigen::Index>(m_));
    bool any = false;
    for (std::size_t j = 0; j < N_; ++j) {
      if (status_[j] == kBasic || !std::isfinite(lb_[j]) || !std::isfinite(ub_[j])) continue;
      if (status_[j] == kLower && d_[j] < -opt_.dual_tol) {
        status_[j] = kUpper;
        add_column(j, ub_[j] - lb_[j], delta);
        x_[j] = ub_[j];
        any = true;
      } else if (status_[j] == kUpper && d_[j] > opt_.dual_tol) {
        status_[j] = kLower;
        add_column(j, lb_[j] - ub_[j], delta);
        x_[j] = lb_[j];
        any = true;
      }
    }
    if (any) {
      Vec dx = ftran(delta);
      for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] -= dx[k];
    }
    return any;
  }

  bool out_of_time() const {
    if (!std::isfinite(opt_.time_limit)) return false;
    double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return el > opt_.time_limit;
  }

  double scaled_objective() const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += c_[j] * x_[j];
    return s;
  }

  LpStatus dual_simplex() {
    bool bland = opt_.force_bland;
    std::size_t degenerate = 0;
    double last_obj = -kInf;
    std::vector<double> arow(N_, 0.0);
    std::vector<std::size_t> cand;
    bool fresh = false;
    for (;;) {
      if (iters_ >= opt_.max_iterations) return LpStatus::iteration_limit;
      if ((iters_ & 31) == 0 && out_of_time()) return LpStatus::time_limit;
      if (std::isfinite(cutoff_scaled_) && (iters_ & 7) == 0) {
        if (scaled_objective() > cutoff_scaled_ + 1e-9 * std::max(1.0, std::abs(cutoff_scaled_)))
          return LpStatus::cutoff;
      }
      // Leaving row.
      std::size_t r = m_;
      double best = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        double inf = infeas_of(head_[k]);
        if (inf <= 0.0) continue;
        if (bland) {
          if (r == m_ || head_[k] < head_[r]) r = k;
        } else {
          double score = inf * inf / weights_[k];
          if (score > best) {
            best = score;
            r = k;
          }
        }
      }
      if (r == m_) return LpStatus::optimal;
      std::size_t p = head_[r];
      bool to_lower = x_[p] < lb_[p];
      double s = to_lower ? -1.0 : 1.0;
      Vec er = Vec::Zero(static_cast<Eigen::Index>(m_));
      er[r] = 1.0;
      Vec rho = btran(er);
      // Pivot row and ratio test.
      cand.clear();
      double tmax = kInf;
      for (std::size_t j = 0; j < N_; ++j) {
        if (status_[j] == kBasic) continue;
        if (lb_[j] == ub_[j]) continue;
        double a = dot_column(j, rho);
        arow[j] = a;
        if (std::abs(a) < opt_.pivot_tol) continue;
        double sa = s * a;
        bool elig = (status_[j] == kLower && sa > 0) || (status_[j] == kUpper && sa < 0) || status_[j] == kFree;
        if (!elig) continue;
        cand.push_back(j);
        if (!bland) {
          double lim = (std::abs(d_[j]) + opt_.dual_tol) / std::abs(a);
          if (status_[j] == kFree) lim = opt_.dual_tol / std::abs(a);
          tmax = std::min(tmax, lim);
        }
      }
      if (cand.empty()) {
        if (fresh) return LpStatus::infeasible;
        // Confirm the ray on a fresh factorization before declaring infeasibility.
        if (!refactor()) {
          numerical_trouble_ = true;
          return LpStatus::iteration_limit;
        }
        compute_primal();
        compute_duals();
        flip_to_dual_feasible();
        fresh = true;
        continue;
      }
      fresh = false;
      std::size_t q = N_;
      if (bland) {
        double tmin = kInf;
        for (auto j : cand) {
          double t = std::max(0.0, d_[j] / (s * arow[j]));
          if (t < tmin - 1e-12 || (t <= tmin + 1e-12 && j < q)) {
            if (t < tmin - 1e-12) q = j;
            else q = std::min(q, j);
            tmin = std::min(tmin, t);
          }
        }
      } else {
        double amax = 0.0;
        for (auto j : cand) {
          double t = std::abs(d_[j]) / std::abs(arow[j]);
          if (status_[j] == kFree) t = 0.0;
          if (t <= tmax && std::abs(arow[j]) > amax) {
            amax = std::abs(arow[j]);
            q = j;
          }
        }
      }
      if (q == N_) return LpStatus::infeasible;
      Vec aq = Vec::Zero(static_cast<Eigen::Index>(m_));
      add_column(q, 1.0, aq);
      Vec alpha = ftran(aq);
      double arq = alpha[r];
      if (std::abs(arq) < opt_.pivot_tol || std::abs(arq - arow[q]) > 1e-6 * (1.0 + std::abs(arq))) {
        // Row and column pivot disagree: refresh the factorization.
        if (etas_.empty()) {
          numerical_trouble_ = true;
          return LpStatus::iteration_limit;
        }
        if (!refactor()) {
          numerical_trouble_ = true;
          return LpStatus::iteration_limit;
        }
        compute_primal();
        compute_duals();
        continue;
      }
      // Dual step.
      double theta_d = d_[q] / arq;
      for (std::size_t j = 0; j < N_; ++j)
        if (status_[j] != kBasic && lb_[j] != ub_[j]) d_[j] -= theta_d * arow[j];
      for (std::size_t j = 0; j < N_; ++j)
        if (status_[j] != kBasic && lb_[j] == ub_[j]) d_[j] -= theta_d * dot_column(j, rho);
      d_[q] = 0.0;
      d_[p] = -theta_d;
      // Steepest-edge weights.
      double wr = rho.squaredNorm();
      Vec tau = ftran(rho);
      for (std::size_t k = 0; k < m_; ++k) {
        if (k == r) continue;
        double ratio = alpha[k] / arq;
        if (ratio == 0.0) continue;
        weights_[k] = std::max(weights_[k] + ratio * (ratio * wr - 2.0 * tau[k]), 1e-8);
      }
      weights_[r] = std::max(wr / (arq * arq), 1e-8);
      // Primal step.
      double bound = to_lower ? lb_[p] : ub_[p];
      double theta_p = (x_[p] - bound) / arq;
      for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] -= theta_p * alpha[k];
      x_[q] += theta_p;
      x_[p] = bound;
      status_[p] = to_lower ? kLower : kUpper;
      if (lb_[p] == ub_[p]) status_[p] = kLower;
      ++iters_;
      if (!update_basis(r, q, alpha)) {
        numerical_trouble_ = true;
        return LpStatus::iteration_limit;
      }
      // Boxed variables that lost dual feasibility are flipped.
      flip_to_dual_feasible();
      double obj = scaled_objective();
      if (obj <= last_obj + 1e-12 * std::max(1.0, std::abs(obj))) {
        if (++degenerate > opt_.degenerate_limit) bland = true;
      } else {
        degenerate = 0;
        bland = opt_.force_bland;
      }
      last_obj = std::max(last_obj, obj);
      if (dual_infeasibility() > 1e3 * opt_.dual_tol) return primal_simplex();
    }
  }

  LpStatus primal_simplex() {
    bool bland = opt_.force_bland;
    std::size_t degenerate = 0;
    std::vector<double> dj(N_, 0.0);
    for (;;) {
      if (iters_ >= opt_.max_iterations) return LpStatus::iteration_limit;
      if ((iters_ & 31) == 0 && out_of_time()) return LpStatus::time_limit;
      // Phase-dependent cost vector on the basis.
      bool phase1 = false;
      Vec cb(static_cast<Eigen::Index>(m_));
      for (std::size_t k = 0; k < m_; ++k) {
        std::size_t j = head_[k];
        if (x_[j] < lb_[j] - opt_.primal_tol) {
          cb[k] = -1.0;
          phase1 = true;
        } else if (x_[j] > ub_[j] + opt_.primal_tol) {
          cb[k] = 1.0;
          phase1 = true;
        } else {
          cb[k] = 0.0;
        }
      }
      if (!phase1)
        for (std::size_t k = 0; k < m_; ++k) cb[k] = c_[head_[k]];
      Vec y = btran(cb);
      std::size_t q = N_;
      double best = 0.0;
      double dir = 0.0;
      for (std::size_t j = 0; j < N_; ++j) {
        if (status_[j] == kBasic || lb_[j] == ub_[j]) continue;
        double d = (phase1 ? 0.0 : c_[j]) - dot_column(j, y);
        dj[j] = d;
        double gain = 0.0, dd = 0.0;
        if ((status_[j] == kLower || status_[j] == kFree) && d < -opt_.dual_tol) {
          gain = -d;
          dd = 1.0;
        } else if ((status_[j] == kUpper || status_[j] == kFree) && d > opt_.dual_tol) {
          gain = d;
          dd = -1.0;
        }
        if (gain <= 0.0) continue;
        if (bland) {
          if (q == N_) {
            q = j;
            dir = dd;
          }
        } else if (gain > best) {
          best = gain;
          q = j;
          dir = dd;
        }
      }
      if (q == N_) {
        if (phase1) return LpStatus::infeasible;
        y_ = y;
        compute_duals();
        return LpStatus::optimal;
      }
      Vec aq = Vec::Zero(static_cast<Eigen::Index>(m_));
      add_column(q, 1.0, aq);
      Vec alpha = ftran(aq);
      // Ratio test (Harris two-pass; Bland uses exact minimum with lowest index).
      auto block_of = [&](std::size_t k, double tol, double& t, double& target) -> bool {
        double rate = -dir * alpha[k];
        if (std::abs(alpha[k]) < opt_.pivot_tol) return false;
        std::size_t j = head_[k];
        double xv = x_[j];
        if (rate < 0) {
          if (xv > ub_[j] + opt_.primal_tol) target = ub_[j];
          else if (xv >= lb_[j] - opt_.primal_tol) target = lb_[j];
          else return false;
          if (!std::isfinite(target)) return false;
          t = (xv - target + tol) / (-rate);
        } else {
          if (xv < lb_[j] - opt_.primal_tol) target = lb_[j];
          else if (xv <= ub_[j] + opt_.primal_tol) target = ub_[j];
          else return false;
          if (!std::isfinite(target)) return false;
          t = (target - xv + tol) / rate;
        }
        t = std::max(t, 0.0);
        return true;
      };
      double tflip = (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) ? ub_[q] - lb_[q] : kInf;
      std::size_t r = m_;
      double theta = kInf;
      double leave_at = 0.0;
      if (bland) {
        for (std::size_t k = 0; k < m_; ++k) {
          double t, tg;
          if (!block_of(k, 0.0, t, tg)) continue;
          if (t < theta - 1e-12 || (t <= theta + 1e-12 && r < m_ && head_[k] < head_[r])) {
            theta = std::min(theta, t);
            r = k;
            leave_at = tg;
          }
        }
      } else {
        double tmax = kInf;
        for (std::size_t k = 0; k < m_; ++k) {
          double t, tg;
          if (block_of(k, opt_.primal_tol, t, tg)) tmax = std::min(tmax, t);
        }
        double amax = 0.0;
        for (std::size_t k = 0; k < m_; ++k) {
          double t, tg;
          if (!block_of(k, 0.0, t, tg)) continue;
          if (t <= tmax && std::abs(alpha[k]) > amax) {
            amax = std::abs(alpha[k]);
            r = k;
            theta = t;
            leave_at = tg;
          }
        }
      }
      if (r == m_ && !std::isfinite(tflip)) {
        if (phase1) {
          numerical_trouble_ = true;
          return LpStatus::iteration_limit;
        }
        return LpStatus::unbounded;
      }
      ++iters_;
      if (tflip <= theta) {
        for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] -= dir * tflip * alpha[k];
        status_[q] = status_[q] == kLower ? kUpper : kLower;
        x_[q] = status_[q] == kLower ? lb_[q] : ub_[q];
        degenerate = 0;
        bland = opt_.force_bland;
        continue;
      }
      std::size_t p = head_[r];
      double step = dir * theta;
      for (std::size_t k = 0; k < m_; ++k) x_[head_[k]] -= step * alpha[k];
      x_[q] += step;
      // Leaving variable sits at the bound it reached.
      status_[p] = (leave_at == lb_[p]) ? kLower : kUpper;
      x_[p] = leave_at;
      if (!update_basis(r, q, alpha)) {
        numerical_trouble_ = true;
        return LpStatus::iteration_limit;
      }
      if (theta * std::abs(dir) < 1e-12) {
        if (++degenerate > opt_.degenerate_limit) bland = true;
      } else {
        degenerate = 0;
        bland = opt_.force_bland;
      }
      std::fill(weights_.begin(), weights_.end(), 1.0);
    }
  }

  LpOptions opt_;
  std::size_t n_ = 0, m_ = 0, N_ = 0;
  std::vector<std::size_t> cstart_;
  std::vector<int> rowidx_;
  std::vector<double> val_;
  std::vector<double> c_, lb_, ub_;
  std::vector<double> cscale_, rscale_;
  double objscale_ = 1.0;
  double obj_const_ = 0.0;

  std::vector<std::size_t> head_;
  std::vector<int> pos_;
  std::vector<std::uint8_t> status_;
  std::vector<double> x_, d_;
  Vec y_;
  std::vector<double> weights_;

  std::unique_ptr<Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>> lu_;
  std::vector<Eta> etas_;
  bool factored_ = false;
  bool numerical_trouble_ = false;

  std::size_t iters_ = 0;
  std::size_t total_iterations_ = 0;
  double cutoff_scaled_ = kInf;
  std::chrono::steady_clock::time_point start_;
};

inline SolveStatus to_solve_status(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return SolveStatus::optimal;
    case LpStatus::infeasible: return SolveStatus::infeasible;
    case LpStatus::unbounded: return SolveStatus::unbounded;
    case LpStatus::time_limit: return SolveStatus::time_limit;
    default: return SolveStatus::node_limit;
  }
}

/// LP relaxation of `model` (integrality ignored).
inline Solution solve_lp(const MilpModel& model, LpOptions opt = {}) {
  if (model.num_variables() == 0) throw ValidationError("model has no variables");
  auto t0 = std::chrono::steady_clock::now();
  LpSolver lp(model, opt);
  LpResult r = lp.solve();
  Solution s;
  s.status = to_solve_status(r.status);
  s.lp_iterations = r.iterations;
  if (r.status == LpStatus::optimal) {
    s.values = lp.primal();
    s.objective = model.evaluate_objective(s.values);
    s.bound = s.objective;
    s.gap = 0.0;
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace isrulog
