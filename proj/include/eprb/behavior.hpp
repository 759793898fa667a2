#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "eprb/errors.hpp"
#include "eprb/report.hpp"

namespace eprb {

enum class Outcome : int { plus = +1, minus = -1 };

enum class Side { a, b };

inline constexpr std::array<Outcome, 2> kOutcomes = {Outcome::plus, Outcome::minus};

inline void require_setting(int s) {
  if (s != 1 && s != 2) throw PreconditionError("setting must be 1 or 2, got " + std::to_string(s));
}

/// Joint probabilities p(a_j = m, b_k = n) of a two-setting, two-outcome
/// bipartite experiment.
///
/// Storage order is (setting_a, setting_b, outcome_a, outcome_b) with
/// outcomes ordered (+1, -1), so the flat index i holds the shorthand
/// probability p(i+1): p1 = p(a1=+,b1=+), p2 = p(a1=+,b1=-), ...,
/// p16 = p(a2=-,b2=-). Values are stored as given; nothing is clamped or
/// renormalized.
class Behavior {
 public:
  static constexpr std::size_t kSize = 16;
  using Values = std::array<double, kSize>;
  using Block = std::array<double, 4>;  // ++, +-, -+, --

  Behavior() = default;
  explicit Behavior(const Values& p) : p_(p) {}

  static Behavior from_blocks(const std::array<Block, 4>& blocks) {
    Values p{};
    for (std::size_t blk = 0; blk < 4; ++blk)
      for (std::size_t o = 0; o < 4; ++o) p[4 * blk + o] = blocks[blk][o];
    return Behavior(p);
  }

  static constexpr std::size_t index(int setting_a, int setting_b, Outcome a, Outcome b) {
    return static_cast<std::size_t>(4 * (2 * (setting_a - 1) + (setting_b - 1)) +
                                    2 * (a == Outcome::plus ? 0 : 1) + (b == Outcome::plus ? 0 : 1));
  }

  double operator()(int setting_a, int setting_b, Outcome a, Outcome b) const {
    require_setting(setting_a);
    require_setting(setting_b);
    return p_[index(setting_a, setting_b, a, b)];
  }

  // 1-based shorthand access: p(1) .. p(16).
  double p(int n) const {
    if (n < 1 || n > 16) throw PreconditionError("probability index out of range: p" + std::to_string(n));
    return p_[static_cast<std::size_t>(n - 1)];
  }

  Block block(int setting_a, int setting_b) const {
    require_setting(setting_a);
    require_setting(setting_b);
    const std::size_t base = 4 * (2 * (setting_a - 1) + (setting_b - 1));
    return {p_[base], p_[base + 1], p_[base + 2], p_[base + 3]};
  }

  // p(a_j = m) read off the block where B measured setting k.
  double marginal_a(int j, Outcome m, int k) const {
    return (*this)(j, k, m, Outcome::plus) + (*this)(j, k, m, Outcome::minus);
  }

  // p(b_k = n) read off the block where A measured setting j.
  double marginal_b(int k, Outcome n, int j) const {
    return (*this)(j, k, Outcome::plus, n) + (*this)(j, k, Outcome::minus, n);
  }

  const Values& values() const { return p_; }
  std::span<const double, kSize> span() const { return p_; }

  bool structurally_complete() const {
    for (double v : p_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const Behavior&, const Behavior&) = default;

 private:
  Values p_{};
};

struct CorrelationVector {
  double c11 = 0.0;
  double c12 = 0.0;
  double c21 = 0.0;
  double c22 = 0.0;

  double at(int j, int k) const {
    require_setting(j);
    require_setting(k);
    if (j == 1) return k == 1 ? c11 : c12;
    return k == 1 ? c21 : c22;
  }
};

inline constexpr double kDefaultTolerance = 1e-9;

inline std::string setting_block_name(int j, int k) {
  return "a" + std::to_string(j) + "b" + std::to_string(k);
}

/// Positivity (16 checks), per-block normalization (4) and no-signaling (4).
///
/// A no-signaling check compares the one-side marginal computed from the two
/// blocks that share the setting; its residual is the larger of the two
/// outcome differences. Throws StructuralError if any entry is missing (NaN
/// or infinite).
inline ConstraintReport validate(const Behavior& b, double tol = kDefaultTolerance) {
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (!b.structurally_complete()) throw StructuralError("behavior has missing or non-finite entries");

  ConstraintReport report;
  for (int i = 1; i <= 16; ++i) {
    const double v = b.p(i);
    const double r = v < 0.0 ? -v : (v > 1.0 ? v - 1.0 : 0.0);
    report.add("positivity_p" + std::to_string(i), r, tol);
  }
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k) {
      const auto blk = b.block(j, k);
      report.add("normalization_" + setting_block_name(j, k), blk[0] + blk[1] + blk[2] + blk[3] - 1.0, tol);
    }
  for (int j = 1; j <= 2; ++j) {
    double r = 0.0;
    for (Outcome m : kOutcomes) r = std::max(r, std::abs(b.marginal_a(j, m, 1) - b.marginal_a(j, m, 2)));
    report.add("no_signaling_a" + std::to_string(j), r, tol);
  }
  for (int k = 1; k <= 2; ++k) {
    double r = 0.0;
    for (Outcome n : kOutcomes) r = std::max(r, std::abs(b.marginal_b(k, n, 1) - b.marginal_b(k, n, 2)));
    report.add("no_signaling_b" + std::to_string(k), r, tol);
  }
  return report;
}

inline bool is_valid(const Behavior& b, double tol = kDefaultTolerance) { return validate(b, tol).all_pass(); }

// Expectation of a_j * b_k.
inline double correlation(const Behavior& b, int j, int k) {
  const auto blk = b.block(j, k);
  return blk[0] + blk[3] - blk[1] - blk[2];
}

inline CorrelationVector correlations(const Behavior& b) {
  return {correlation(b, 1, 1), correlation(b, 1, 2), correlation(b, 2, 1), correlation(b, 2, 2)};
}

struct ChshForms {
  double from_correlations = 0.0;  // c11 + c12 + c21 - c22
  double from_probabilities = 0.0; // 2 (p1+p4+p5+p8+p9+p12+p14+p15 - 2)
};

inline ChshForms chsh_forms(const Behavior& b) {
  const auto c = correlations(b);
  const double s = b.p(1) + b.p(4) + b.p(5) + b.p(8) + b.p(9) + b.p(12) + b.p(14) + b.p(15);
  return {c.c11 + c.c12 + c.c21 - c.c22, 2.0 * (s - 2.0)};
}

/// Signed CHSH sum. The correlation form and the probability-sum form agree
/// only for normalized behaviors; a disagreement above `agreement_tol` throws
/// ConsistencyError.
inline double chsh_delta(const Behavior& b, double agreement_tol = 1e-12) {
  const auto f = chsh_forms(b);
  if (!(std::abs(f.from_correlations - f.from_probabilities) <= agreement_tol))
    throw ConsistencyError("CHSH forms disagree by " +
                           std::to_string(std::abs(f.from_correlations - f.from_probabilities)) +
                           "; behavior is not normalized");
  return f.from_correlations;
}

}  // namespace eprb
