#include "tcrobust/linprog.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>

#include "tcrobust/errors.hpp"

namespace tcr {

void LinearProgram::add_row(std::vector<double> coef, RowSense sense, double rhs) {
  if (coef.size() != num_vars()) throw ContractViolation("LinearProgram: row has wrong width");
  rows.push_back({std::move(coef), sense, rhs});
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
    case LpStatus::IterationLimit:
      return "iteration-limit";
  }
  return "?";
}

namespace {

template <class Scalar>
struct Arith;

template <>
struct Arith<double> {
  static constexpr double eps = 1e-9;
  static bool pos(double v) { return v > eps; }
  static bool neg(double v) { return v < -eps; }
  static bool nonzero(double v) { return std::abs(v) > eps; }
  static double from(double v) { return v; }
  static double to_double(double v) { return v; }
};

template <>
struct Arith<mpq_class> {
  static bool pos(const mpq_class& v) { return sgn(v) > 0; }
  static bool neg(const mpq_class& v) { return sgn(v) < 0; }
  static bool nonzero(const mpq_class& v) { return sgn(v) != 0; }
  static mpq_class from(double v) { return mpq_class(v); }
  static double to_double(const mpq_class& v) { return v.get_d(); }
};

template <class Scalar>
class Simplex {
  using A = Arith<Scalar>;

 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp) { build(); }

  LpSolution run() {
    LpSolution out;
    // Phase 1: maximize -sum(artificials).
    std::vector<Scalar> phase1(cols_, Scalar(0));
    for (std::size_t j = art_begin_; j < cols_; ++j) phase1[j] = Scalar(-1);
    if (art_begin_ < cols_) {
      const auto st = optimize(phase1, cols_);
      if (st == LpStatus::IterationLimit) {
        out.status = st;
        return out;
      }
      if (A::neg(objective_value(phase1))) {
        out.status = LpStatus::Infeasible;
        out.pivots = pivots_;
        return out;
      }
      drive_out_artificials();
    }
    // Phase 2 over structural and slack columns only.
    std::vector<Scalar> cost(cols_, Scalar(0));
    for (std::size_t j = 0; j < split_.size(); ++j) {
      const Scalar c = A::from(lp_.objective[j]);
      cost[split_[j].first] += c;
      if (split_[j].second != npos) cost[split_[j].second] -= c;
    }
    const auto st = optimize(cost, art_begin_);
    out.status = st;
    out.pivots = pivots_;
    if (st != LpStatus::Optimal) return out;

    std::vector<Scalar> col_value(cols_, Scalar(0));
    for (std::size_t i = 0; i < rows_; ++i) col_value[basis_[i]] = rhs_[i];
    out.x.assign(split_.size(), 0.0);
    Scalar obj(0);
    for (std::size_t j = 0; j < split_.size(); ++j) {
      Scalar v = col_value[split_[j].first];
      if (split_[j].second != npos) v -= col_value[split_[j].second];
      out.x[j] = A::to_double(v);
      obj += A::from(lp_.objective[j]) * v;
    }
    out.objective = A::to_double(obj);
    return out;
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  void build() {
    const std::size_t n = lp_.num_vars();
    std::size_t col = 0;
    split_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      split_[j].first = col++;
      split_[j].second = lp_.free[j] ? col++ : npos;
    }
    const std::size_t structural = col;

    rows_ = lp_.rows.size();
    std::vector<RowSense> sense(rows_);
    std::vector<bool> flip(rows_, false);
    std::size_t slacks = 0;
    std::size_t arts = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto& r = lp_.rows[i];
      RowSense s = r.sense;
      if (r.rhs < 0.0) {
        flip[i] = true;
        if (s == RowSense::LessEqual) {
          s = RowSense::GreaterEqual;
        } else if (s == RowSense::GreaterEqual) {
          s = RowSense::LessEqual;
        }
      }
      sense[i] = s;
      if (s != RowSense::Equal) ++slacks;
      if (s != RowSense::LessEqual) ++arts;
    }
    art_begin_ = structural + slacks;
    cols_ = art_begin_ + arts;

    tab_.assign(rows_ * cols_, Scalar(0));
    rhs_.assign(rows_, Scalar(0));
    basis_.assign(rows_, npos);
    std::size_t slack_col = structural;
    std::size_t art_col = art_begin_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto& r = lp_.rows[i];
      const Scalar sign = flip[i] ? Scalar(-1) : Scalar(1);
      for (std::size_t j = 0; j < n; ++j) {
        if (r.coef[j] == 0.0) continue;
        const Scalar c = sign * A::from(r.coef[j]);
        at(i, split_[j].first) = c;
        if (split_[j].second != npos) at(i, split_[j].second) = -c;
      }
      rhs_[i] = sign * A::from(r.rhs);
      if (sense[i] == RowSense::LessEqual) {
        at(i, slack_col) = Scalar(1);
        basis_[i] = slack_col++;
      } else if (sense[i] == RowSense::GreaterEqual) {
        at(i, slack_col++) = Scalar(-1);
        at(i, art_col) = Scalar(1);
        basis_[i] = art_col++;
      } else {
        at(i, art_col) = Scalar(1);
        basis_[i] = art_col++;
      }
    }
  }

  Scalar& at(std::size_t i, std::size_t j) { return tab_[i * cols_ + j]; }

  Scalar objective_value(const std::vector<Scalar>& cost) const {
    Scalar v(0);
    for (std::size_t i = 0; i < rows_; ++i) v += cost[basis_[i]] * rhs_[i];
    return v;
  }

  LpStatus optimize(const std::vector<Scalar>& cost, std::size_t allowed_cols) {
    const std::size_t limit = 50000 + 50 * (rows_ + cols_);
    std::size_t degenerate_run = 0;
    std::vector<Scalar> reduced(cols_);
    while (true) {
      if (pivots_ > limit) return LpStatus::IterationLimit;
      // Reduced costs d_j = c_j - c_B B^{-1} A_j.
      for (std::size_t j = 0; j < allowed_cols; ++j) reduced[j] = cost[j];
      for (std::size_t i = 0; i < rows_; ++i) {
        const Scalar& cb = cost[basis_[i]];
        if (!A::nonzero(cb)) continue;
        const Scalar* row = &tab_[i * cols_];
        for (std::size_t j = 0; j < allowed_cols; ++j) {
          if (A::nonzero(row[j])) reduced[j] -= cb * row[j];
        }
      }
      const bool bland = degenerate_run > 30;
      std::size_t enter = npos;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (!A::pos(reduced[j])) continue;
        if (is_basic(j)) continue;
        if (enter == npos || (!bland && reduced[j] > reduced[enter])) enter = j;
        if (bland) break;
      }
      if (enter == npos) return LpStatus::Optimal;

      std::size_t leave = npos;
      Scalar best_ratio(0);
      for (std::size_t i = 0; i < rows_; ++i) {
        const Scalar& a = tab_[i * cols_ + enter];
        if (!A::pos(a)) continue;
        const Scalar ratio = rhs_[i] / a;
        if (leave == npos || ratio < best_ratio ||
            (!(best_ratio < ratio) && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == npos) return LpStatus::Unbounded;
      degenerate_run = A::pos(best_ratio) ? 0 : degenerate_run + 1;
      pivot(leave, enter);
    }
  }

  bool is_basic(std::size_t j) const {
    for (std::size_t b : basis_) {
      if (b == j) return true;
    }
    return false;
  }

  void pivot(std::size_t r, std::size_t c) {
    ++pivots_;
    Scalar* prow = &tab_[r * cols_];
    const Scalar p = prow[c];
    for (std::size_t j = 0; j < cols_; ++j) {
      if (A::nonzero(prow[j])) prow[j] /= p;
    }
    rhs_[r] /= p;
    prow[c] = Scalar(1);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      Scalar* row = &tab_[i * cols_];
      const Scalar f = row[c];
      if (!A::nonzero(f)) {
        row[c] = Scalar(0);
        continue;
      }
      for (std::size_t j = 0; j < cols_; ++j) {
        if (A::nonzero(prow[j])) row[j] -= f * prow[j];
      }
      row[c] = Scalar(0);
      rhs_[i] -= f * rhs_[r];
    }
    basis_[r] = c;
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < art_begin_) continue;
      std::size_t enter = npos;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (A::nonzero(tab_[i * cols_ + j]) && !is_basic(j)) {
          enter = j;
          break;
        }
      }
      if (enter != npos) {
        pivot(i, enter);
      } else {
        // Redundant row: zero it so it never constrains phase 2.
        for (std::size_t j = 0; j < cols_; ++j) tab_[i * cols_ + j] = Scalar(0);
        tab_[i * cols_ + basis_[i]] = Scalar(1);
        rhs_[i] = Scalar(0);
      }
    }
  }

  const LinearProgram& lp_;
  std::vector<std::pair<std::size_t, std::size_t>> split_;  // (plus col, minus col)
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t art_begin_ = 0;
  std::vector<Scalar> tab_;
  std::vector<Scalar> rhs_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, LpArithmetic arithmetic) {
  for (const auto& r : lp.rows) {
    if (r.coef.size() != lp.num_vars()) throw ContractViolation("solve_lp: row has wrong width");
  }
  if (arithmetic == LpArithmetic::Exact) return Simplex<mpq_class>(lp).run();
  return Simplex<double>(lp).run();
}

}  // namespace tcr
