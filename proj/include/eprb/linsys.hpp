#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eprb/behavior.hpp"
#include "eprb/errors.hpp"
#include "eprb/report.hpp"

namespace eprb {

/// Dense row-major integer matrix.
template <class Int = std::int64_t>
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Int> data;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, Int{0}) {}

  Int& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  void append_row(const std::vector<Int>& row) {
    if (rows != 0 && row.size() != cols) throw PreconditionError("row length mismatch");
    cols = row.size();
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }

  std::vector<Int> row(std::size_t i) const {
    return {data.begin() + static_cast<std::ptrdiff_t>(i * cols),
            data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)};
  }

  IntMatrix top_rows(std::size_t n) const {
    IntMatrix out(std::min(n, rows), cols);
    std::copy_n(data.begin(), out.rows * cols, out.data.begin());
    return out;
  }
};

/// Exact rank by fraction-free (Bareiss) elimination. Every division is
/// exact, so no tolerance is involved; intermediate entries are bounded by
/// minors of the input, which is ample headroom for small coefficient
/// matrices in 64-bit integers.
template <class Int>
std::size_t rank(IntMatrix<Int> m) {
  std::size_t r = 0;
  Int prev{1};
  for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
    std::size_t piv = r;
    while (piv < m.rows && m(piv, c) == Int{0}) ++piv;
    if (piv == m.rows) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(piv, j), m(r, j));
    for (std::size_t i = r + 1; i < m.rows; ++i) {
      for (std::size_t j = c + 1; j < m.cols; ++j) m(i, j) = (m(r, c) * m(i, j) - m(i, c) * m(r, j)) / prev;
      m(i, c) = Int{0};
    }
    prev = m(r, c);
    ++r;
  }
  return r;
}

/// The 12 x 16 normalization + no-signaling system over p1..p16.
/// Rows 0-3: block normalization (rhs 1). Rows 4-11: marginal equalities
/// (rhs 0), A side first then B side.
struct ConstraintMatrix {
  static constexpr std::size_t kRows = 12;
  static constexpr std::size_t kCols = 16;

  std::array<std::array<int, kCols>, kRows> coefficients{};
  std::array<int, kRows> rhs{};

  IntMatrix<std::int64_t> as_int_matrix() const {
    IntMatrix<std::int64_t> m(kRows, kCols);
    for (std::size_t i = 0; i < kRows; ++i)
      for (std::size_t j = 0; j < kCols; ++j) m(i, j) = coefficients[i][j];
    return m;
  }

  // Signed residual of row i at the 16-vector p (p[0] is p1).
  double row_residual(std::size_t i, const Behavior::Values& p) const {
    double s = 0.0;
    for (std::size_t j = 0; j < kCols; ++j) s += coefficients[i][j] * p[j];
    return s - rhs[i];
  }

  double max_residual(const Behavior::Values& p) const {
    double m = 0.0;
    for (std::size_t i = 0; i < kRows; ++i) m = std::max(m, std::abs(row_residual(i, p)));
    return m;
  }
};

inline ConstraintMatrix build_matrix() {
  // Each row lists (probability number, coefficient) pairs.
  using Term = std::pair<int, int>;
  const std::array<std::vector<Term>, 12> rows = {{
      {{1, 1}, {2, 1}, {3, 1}, {4, 1}},
      {{5, 1}, {6, 1}, {7, 1}, {8, 1}},
      {{9, 1}, {10, 1}, {11, 1}, {12, 1}},
      {{13, 1}, {14, 1}, {15, 1}, {16, 1}},
      {{1, 1}, {2, 1}, {5, -1}, {6, -1}},
      {{3, 1}, {4, 1}, {7, -1}, {8, -1}},
      {{9, 1}, {10, 1}, {13, -1}, {14, -1}},
      {{11, 1}, {12, 1}, {15, -1}, {16, -1}},
      {{1, 1}, {3, 1}, {9, -1}, {11, -1}},
      {{2, 1}, {4, 1}, {10, -1}, {12, -1}},
      {{5, 1}, {7, 1}, {13, -1}, {15, -1}},
      {{6, 1}, {8, 1}, {14, -1}, {16, -1}},
  }};
  ConstraintMatrix m;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto [p, c] : rows[i]) m.coefficients[i][static_cast<std::size_t>(p - 1)] = c;
    m.rhs[i] = i < 4 ? 1 : 0;
  }
  return m;
}

// Probability numbers of the free and dependent variable sets.
inline constexpr std::array<int, 8> kFreeIndices = {1, 4, 5, 8, 9, 12, 14, 15};
inline constexpr std::array<int, 8> kDependentIndices = {2, 3, 6, 7, 10, 11, 13, 16};

/// Closed-form solution: each dependent probability equals
/// (1 + sum_i coeff[i] * free[i]) / 2, with free values ordered as
/// kFreeIndices. Row r gives the dependent variable kDependentIndices[r].
inline constexpr std::array<std::array<int, 8>, 8> kClosedForm = {{
    //  p1  p4  p5  p8  p9 p12 p14 p15
    {-1, -1, +1, -1, -1, +1, +1, -1},  // p2
    {-1, -1, -1, +1, +1, -1, -1, +1},  // p3
    {+1, -1, -1, -1, -1, +1, +1, -1},  // p6
    {-1, +1, -1, -1, +1, -1, -1, +1},  // p7
    {-1, +1, +1, -1, -1, -1, +1, -1},  // p10
    {+1, -1, -1, +1, -1, -1, -1, +1},  // p11
    {-1, +1, +1, -1, +1, -1, -1, -1},  // p13
    {+1, -1, -1, +1, -1, +1, -1, -1},  // p16
}};

namespace detail {

template <const std::array<int, 8>& Indices>
class NamedOctet {
 public:
  using Values = std::array<double, 8>;

  NamedOctet() = default;
  explicit NamedOctet(const Values& v) : v_(v) {}

  static constexpr const std::array<int, 8>& indices() { return Indices; }

  static constexpr bool contains(int p) {
    return std::find(Indices.begin(), Indices.end(), p) != Indices.end();
  }

  // Position of probability number p within the set.
  static std::size_t slot(int p) {
    auto it = std::find(Indices.begin(), Indices.end(), p);
    if (it == Indices.end()) throw PreconditionError("p" + std::to_string(p) + " is not a member of this set");
    return static_cast<std::size_t>(it - Indices.begin());
  }

  double get(int p) const { return v_[slot(p)]; }
  void set(int p, double value) { v_[slot(p)] = value; }

  double operator[](std::size_t i) const { return v_[i]; }
  const Values& values() const { return v_; }

  double sum() const { return std::accumulate(v_.begin(), v_.end(), 0.0); }

  bool structurally_complete() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
  }

  static NamedOctet filled(double x) {
    Values v;
    v.fill(x);
    return NamedOctet(v);
  }

  friend bool operator==(const NamedOctet&, const NamedOctet&) = default;

 private:
  Values v_{};
};

}  // namespace detail

/// The eight free probabilities {p1, p4, p5, p8, p9, p12, p14, p15}.
using FreeSet = detail::NamedOctet<kFreeIndices>;
/// The eight dependent probabilities {p2, p3, p6, p7, p10, p11, p13, p16}.
using DependentSet = detail::NamedOctet<kDependentIndices>;

inline Behavior assemble(const FreeSet& u, const DependentSet& v) {
  Behavior::Values p{};
  for (std::size_t i = 0; i < 8; ++i) {
    p[static_cast<std::size_t>(kFreeIndices[i] - 1)] = u[i];
    p[static_cast<std::size_t>(kDependentIndices[i] - 1)] = v[i];
  }
  return Behavior(p);
}

inline FreeSet free_part(const Behavior& b) {
  FreeSet::Values v;
  for (std::size_t i = 0; i < 8; ++i) v[i] = b.p(kFreeIndices[i]);
  return FreeSet(v);
}

inline DependentSet dependent_part(const Behavior& b) {
  DependentSet::Values v;
  for (std::size_t i = 0; i < 8; ++i) v[i] = b.p(kDependentIndices[i]);
  return DependentSet(v);
}

/// Dependent set from the closed forms. The assembled 16-vector is checked
/// against every row of build_matrix(); a residual above
/// 1e-12 * max(1, |u|_inf) throws ConsistencyError. Out-of-range values are
/// returned unchanged.
inline DependentSet solve_dependent(const FreeSet& u) {
  if (!u.structurally_complete()) throw StructuralError("free set has missing or non-finite entries");
  DependentSet::Values v;
  for (std::size_t r = 0; r < 8; ++r) {
    double s = 1.0;
    for (std::size_t i = 0; i < 8; ++i) s += kClosedForm[r][i] * u[i];
    v[r] = 0.5 * s;
  }
  DependentSet out(v);

  double scale = 1.0;
  for (double x : u.values()) scale = std::max(scale, std::abs(x));
  const double residual = build_matrix().max_residual(assemble(u, out).values());
  if (!(residual <= 1e-12 * scale))
    throw ConsistencyError("closed-form solution fails substitution check, residual " + std::to_string(residual));
  return out;
}

/// Dependent set by eliminating directly on the 12 x 16 system (partial
/// pivoting, double precision). Independent of kClosedForm.
inline DependentSet solve_dependent_generic(const FreeSet& u, const ConstraintMatrix& m = build_matrix()) {
  constexpr std::size_t n = 8;
  std::array<std::array<double, n + 1>, ConstraintMatrix::kRows> aug{};
  for (std::size_t i = 0; i < ConstraintMatrix::kRows; ++i) {
    double rhs = m.rhs[i];
    for (std::size_t f = 0; f < n; ++f) rhs -= m.coefficients[i][static_cast<std::size_t>(kFreeIndices[f] - 1)] * u[f];
    for (std::size_t d = 0; d < n; ++d)
      aug[i][d] = m.coefficients[i][static_cast<std::size_t>(kDependentIndices[d] - 1)];
    aug[i][n] = rhs;
  }

  std::size_t row = 0;
  for (std::size_t c = 0; c < n; ++c, ++row) {
    std::size_t piv = row;
    for (std::size_t i = row + 1; i < aug.size(); ++i)
      if (std::abs(aug[i][c]) > std::abs(aug[piv][c])) piv = i;
    if (std::abs(aug[piv][c]) < 1e-12) throw ConsistencyError("dependent columns are not of full rank");
    std::swap(aug[piv], aug[row]);
    for (std::size_t i = 0; i < aug.size(); ++i) {
      if (i == row || aug[i][c] == 0.0) continue;
      const double f = aug[i][c] / aug[row][c];
      for (std::size_t j = c; j <= n; ++j) aug[i][j] -= f * aug[row][j];
    }
  }
  for (std::size_t i = row; i < aug.size(); ++i)
    if (std::abs(aug[i][n]) > 1e-9) throw ConsistencyError("constraint system is inconsistent for this free set");

  DependentSet::Values v;
  for (std::size_t d = 0; d < n; ++d) v[d] = aug[d][n] / aug[d][d];
  return DependentSet(v);
}

/// Feasibility of the behavior determined by a free set.
///
/// Checks, in order: [0,1] range of each of the eight dependent values;
/// non-negativity of p13 written over the free set; non-negativity of p2+p7;
/// non-negativity of the full dependent sum; the Hardy causality bound
/// 2 p13 - 1 <= p4 + p5 + p9. With `exhaustive`, also every one of the 255
/// non-empty subset sums of the dependent set.
inline ConstraintReport check_feasible(const FreeSet& u, double tol = kDefaultTolerance, bool exhaustive = false) {
  if (!u.structurally_complete()) throw StructuralError("free set has missing or non-finite entries");
  for (std::size_t i = 0; i < 8; ++i)
    if (u[i] < 0.0 || u[i] > 1.0)
      throw PreconditionError("free probability p" + std::to_string(kFreeIndices[i]) + " = " + std::to_string(u[i]) +
                              " lies outside [0,1]");

  const DependentSet v = solve_dependent(u);
  ConstraintReport report;
  for (std::size_t i = 0; i < 8; ++i) {
    const double x = v[i];
    report.add("range_p" + std::to_string(kDependentIndices[i]), x < 0.0 ? -x : (x > 1.0 ? x - 1.0 : 0.0), tol);
  }
  auto excess = [](double lhs, double rhs) { return std::max(0.0, lhs - rhs); };  // lhs <= rhs
  const auto p = [&](int n) { return u.get(n); };

  report.add("p13_nonnegativity", excess(p(1) + p(8) + p(12) + p(14) + p(15), 1.0 + p(4) + p(5) + p(9)), tol);
  report.add("p2_plus_p7_nonnegativity", excess(p(1) + p(8), 1.0), tol);
  report.add("dependent_sum_nonnegativity", excess(u.sum(), 4.0), tol);
  report.add("hardy_causality_bound", excess(2.0 * v.get(13) - 1.0, p(4) + p(5) + p(9)), tol);

  if (exhaustive) {
    for (unsigned mask = 1; mask < 256; ++mask) {
      double s = 0.0;
      std::string name = "subset_sum";
      for (std::size_t i = 0; i < 8; ++i)
        if (mask & (1u << i)) {
          s += v[i];
          name += "_p" + std::to_string(kDependentIndices[i]);
        }
      report.add(name, std::max(0.0, -s), tol);
    }
  }
  return report;
}

}  // namespace eprb
