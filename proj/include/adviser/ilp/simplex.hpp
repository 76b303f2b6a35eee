#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace adviser {

// maximize c·x  s.t.  A x <= b,  0 <= x <= ub.
// Dense rows; intended for models of a few thousand entries per row.
struct LpProblem {
  int n = 0;
  std::vector<std::vector<double>> a;  // m rows of length n
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> ub;  // per column, finite
};

enum class LpStatus { Optimal, Infeasible, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;
  std::vector<double> x;
  long pivots = 0;
};

struct SimplexOptions {
  double tol = 1e-9;
  long max_pivots = 200000;
  int degenerate_switch = 50;  // consecutive degenerate pivots before Bland's rule
};

namespace detail {

// Bounded-variable tableau. Columns: structural [0, n), slacks [n, n+m),
// artificials after that. Nonbasic variables sit at 0 or at their upper bound.
class Tableau {
 public:
  Tableau(const LpProblem& p, const SimplexOptions& o) : opt_(o), m_(static_cast<int>(p.b.size())), n_(p.n) {
    int arts = 0;
    for (double bi : p.b) arts += bi < 0;
    total_ = n_ + m_ + arts;
    t_.assign(static_cast<std::size_t>(m_), std::vector<double>(static_cast<std::size_t>(total_), 0.0));
    rhs_.assign(static_cast<std::size_t>(m_), 0.0);
    ub_.assign(static_cast<std::size_t>(total_), kInf);
    at_ub_.assign(static_cast<std::size_t>(total_), 0);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    is_basic_.assign(static_cast<std::size_t>(total_), -1);
    for (int j = 0; j < n_; ++j) ub_[static_cast<std::size_t>(j)] = p.ub[static_cast<std::size_t>(j)];
    int art = n_ + m_;
    for (int i = 0; i < m_; ++i) {
      auto& row = t_[static_cast<std::size_t>(i)];
      const double sign = p.b[static_cast<std::size_t>(i)] < 0 ? -1.0 : 1.0;
      for (int j = 0; j < n_; ++j) row[static_cast<std::size_t>(j)] = sign * p.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      row[static_cast<std::size_t>(n_ + i)] = sign;
      rhs_[static_cast<std::size_t>(i)] = sign * p.b[static_cast<std::size_t>(i)];
      if (sign < 0) {
        row[static_cast<std::size_t>(art)] = 1.0;
        set_basic(i, art++);
      } else {
        set_basic(i, n_ + i);
      }
    }
    cost_.assign(static_cast<std::size_t>(total_), 0.0);
  }

  // Phase 1 then phase 2. Returns status; values via value().
  LpStatus run(const std::vector<double>& c) {
    if (total_ > n_ + m_) {
      std::vector<double> phase1(static_cast<std::size_t>(total_), 0.0);
      for (int j = n_ + m_; j < total_; ++j) phase1[static_cast<std::size_t>(j)] = -1.0;
      set_objective(phase1);
      const LpStatus s = optimize();
      if (s != LpStatus::Optimal) return s;
      double infeas = 0;
      for (int j = n_ + m_; j < total_; ++j) infeas += value(j);
      if (infeas > 1e-7) return LpStatus::Infeasible;
      for (int j = n_ + m_; j < total_; ++j) ub_[static_cast<std::size_t>(j)] = 0.0;
    }
    std::vector<double> full(static_cast<std::size_t>(total_), 0.0);
    for (int j = 0; j < n_; ++j) full[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)];
    set_objective(full);
    return optimize();
  }

  double value(int j) const {
    const int r = is_basic_[static_cast<std::size_t>(j)];
    if (r >= 0) return rhs_[static_cast<std::size_t>(r)];
    return at_ub_[static_cast<std::size_t>(j)] ? ub_[static_cast<std::size_t>(j)] : 0.0;
  }
  long pivots() const { return pivots_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  void set_basic(int row, int j) {
    if (basis_[static_cast<std::size_t>(row)] >= 0) is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = -1;
    basis_[static_cast<std::size_t>(row)] = j;
    is_basic_[static_cast<std::size_t>(j)] = row;
    at_ub_[static_cast<std::size_t>(j)] = 0;
  }

  // rhs_ holds basic values given nonbasics at their bounds; reduced costs
  // d_j = c_j - c_B B^-1 a_j.
  void set_objective(const std::vector<double>& c) {
    cost_ = c;
    d_ = c;
    for (int i = 0; i < m_; ++i) {
      const double cb = c[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
      if (cb == 0.0) continue;
      const auto& row = t_[static_cast<std::size_t>(i)];
      for (int j = 0; j < total_; ++j) d_[static_cast<std::size_t>(j)] -= cb * row[static_cast<std::size_t>(j)];
    }
  }

  LpStatus optimize() {
    int degenerate = 0;
    while (true) {
      if (pivots_ >= opt_.max_pivots) return LpStatus::IterationLimit;
      const bool bland = degenerate >= opt_.degenerate_switch;
      int enter = -1;
      double best = opt_.tol;
      for (int j = 0; j < total_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)] >= 0 || ub_[static_cast<std::size_t>(j)] <= 0.0) continue;
        const double dj = d_[static_cast<std::size_t>(j)];
        const double gain = at_ub_[static_cast<std::size_t>(j)] ? -dj : dj;
        if (gain > best) {
          enter = j;
          if (bland) break;
          best = gain;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      // Moving x_enter by θ in direction dir changes basic i by -dir·t[i][enter]·θ.
      const double dir = at_ub_[static_cast<std::size_t>(enter)] ? -1.0 : 1.0;
      double theta = ub_[static_cast<std::size_t>(enter)];
      int leave_row = -1;
      bool leave_to_ub = false;
      double leave_alpha = 0;
      for (int i = 0; i < m_; ++i) {
        const double alpha = dir * t_[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
        if (std::abs(alpha) <= opt_.tol) continue;
        const int bj = basis_[static_cast<std::size_t>(i)];
        const double v = rhs_[static_cast<std::size_t>(i)];
        double limit;
        bool to_ub;
        if (alpha > 0) {
          limit = std::max(0.0, v) / alpha;
          to_ub = false;
        } else {
          const double u = ub_[static_cast<std::size_t>(bj)];
          if (u == kInf) continue;
          limit = std::max(0.0, u - v) / -alpha;
          to_ub = true;
        }
        bool take = limit < theta - opt_.tol;
        if (!take && leave_row >= 0 && limit <= theta + opt_.tol)
          take = bland ? bj < basis_[static_cast<std::size_t>(leave_row)] : std::abs(alpha) > std::abs(leave_alpha);
        if (take) {
          theta = std::min(theta, limit);
          leave_row = i;
          leave_to_ub = to_ub;
          leave_alpha = alpha;
        }
      }
      if (leave_row < 0 && theta == kInf) return LpStatus::IterationLimit;  // unbounded; cannot happen with finite ub

      ++pivots_;
      degenerate = theta <= opt_.tol ? degenerate + 1 : 0;
      for (int i = 0; i < m_; ++i)
        rhs_[static_cast<std::size_t>(i)] -= dir * t_[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)] * theta;

      if (leave_row < 0) {  // bound flip
        at_ub_[static_cast<std::size_t>(enter)] = !at_ub_[static_cast<std::size_t>(enter)];
        continue;
      }
      const int leaving = basis_[static_cast<std::size_t>(leave_row)];
      const double entering_value = value_nonbasic(enter) + dir * theta;
      pivot(leave_row, enter);
      rhs_[static_cast<std::size_t>(leave_row)] = entering_value;
      at_ub_[static_cast<std::size_t>(leaving)] = leave_to_ub;
    }
  }

  double value_nonbasic(int j) const { return at_ub_[static_cast<std::size_t>(j)] ? ub_[static_cast<std::size_t>(j)] : 0.0; }

  void pivot(int r, int e) {
    auto& pr = t_[static_cast<std::size_t>(r)];
    const double piv = pr[static_cast<std::size_t>(e)];
    for (auto& v : pr) v /= piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      auto& row = t_[static_cast<std::size_t>(i)];
      const double f = row[static_cast<std::size_t>(e)];
      if (f == 0.0) continue;
      for (int j = 0; j < total_; ++j) row[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
      row[static_cast<std::size_t>(e)] = 0.0;
    }
    const double f = d_[static_cast<std::size_t>(e)];
    if (f != 0.0) {
      for (int j = 0; j < total_; ++j) d_[static_cast<std::size_t>(j)] -= f * pr[static_cast<std::size_t>(j)];
      d_[static_cast<std::size_t>(e)] = 0.0;
    }
    set_basic(r, e);
  }

  SimplexOptions opt_;
  int m_, n_, total_ = 0;
  std::vector<std::vector<double>> t_;
  std::vector<double> rhs_, ub_, cost_, d_;
  std::vector<char> at_ub_;
  std::vector<int> basis_, is_basic_;
  long pivots_ = 0;
};

}  // namespace detail

inline LpResult solve_lp(const LpProblem& p, const SimplexOptions& opt = {}) {
  detail::Tableau tab(p, opt);
  LpResult r;
  r.status = tab.run(p.c);
  r.pivots = tab.pivots();
  if (r.status != LpStatus::Optimal) return r;
  r.x.resize(static_cast<std::size_t>(p.n));
  for (int j = 0; j < p.n; ++j) {
    r.x[static_cast<std::size_t>(j)] = tab.value(j);
    r.objective += p.c[static_cast<std::size_t>(j)] * r.x[static_cast<std::size_t>(j)];
  }
  return r;
}

}  // namespace adviser
