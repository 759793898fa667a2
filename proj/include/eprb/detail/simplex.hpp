#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace eprb::detail {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

// Dense two-phase tableau simplex for
//   minimize c.x  subject to  A x = b, x >= 0.
// Bland's rule throughout, so it terminates on degenerate problems. Meant
// for problems with a few dozen rows and columns.
class DenseSimplex {
 public:
  DenseSimplex(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c, double eps = 1e-11)
      : m_(a.size()), n_(c.size()), eps_(eps) {
    const std::size_t width = n_ + m_ + 1;
    tab_.assign(m_ + 1, std::vector<double>(width, 0.0));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sign * a[i][j];
      tab_[i][n_ + i] = 1.0;
      tab_[i][width - 1] = sign * b[i];
      basis_[i] = n_ + i;
    }
    cost_ = std::move(c);
  }

  LpResult solve() {
    LpResult out;
    const std::size_t rhs = n_ + m_;

    // Phase 1: minimize the sum of artificials.
    auto& obj = tab_[m_];
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j <= rhs; ++j)
        if (j < n_ || j == rhs) obj[j] -= tab_[i][j];
    if (!iterate(n_ + m_)) return out;  // cannot be unbounded in phase 1
    if (-tab_[m_][rhs] > 1e-9) {
      out.status = LpResult::Status::infeasible;
      return out;
    }
    drive_out_artificials();

    // Phase 2 over the original columns only.
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) obj[j] = cost_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= n_) continue;
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= rhs; ++j) obj[j] -= cb * tab_[i][j];
    }
    if (!iterate(n_)) {
      out.status = LpResult::Status::unbounded;
      return out;
    }

    out.status = LpResult::Status::optimal;
    out.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) out.x[basis_[i]] = tab_[i][rhs];
    out.objective = -tab_[m_][rhs];
    return out;
  }

 private:
  // Returns false if the problem is unbounded in the allowed columns.
  bool iterate(std::size_t allowed_cols) {
    const std::size_t rhs = n_ + m_;
    for (;;) {
      std::size_t enter = allowed_cols;
      for (std::size_t j = 0; j < allowed_cols; ++j)
        if (tab_[m_][j] < -eps_) {
          enter = j;
          break;
        }
      if (enter == allowed_cols) return true;

      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        if (tab_[i][enter] <= eps_) continue;
        const double ratio = tab_[i][rhs] / tab_[i][enter];
        if (ratio < best - eps_ || (std::abs(ratio - best) <= eps_ && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      for (std::size_t j = 0; j < n_; ++j)
        if (std::abs(tab_[i][j]) > eps_) {
          pivot(i, j);
          break;
        }
      // A row left with an artificial basic variable is redundant; its
      // artificial stays at zero and never re-enters in phase 2.
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    auto& pr = tab_[row];
    const double pv = pr[col];
    for (double& v : pr) v /= pv;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == row) continue;
      const double f = tab_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < pr.size(); ++j) tab_[i][j] -= f * pr[j];
    }
    basis_[row] = col;
  }

  std::size_t m_;
  std::size_t n_;
  double eps_;
  std::vector<std::vector<double>> tab_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
};

inline LpResult solve_lp(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c) {
  return DenseSimplex(std::move(a), std::move(b), std::move(c)).solve();
}

}  // namespace eprb::detail
