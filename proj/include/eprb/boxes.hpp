#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "eprb/behavior.hpp"
#include "eprb/detail/simplex.hpp"
#include "eprb/errors.hpp"
#include "eprb/linsys.hpp"

namespace eprb {

/// Local deterministic strategy: fixed outcomes for a1, a2, b1, b2.
struct DeterministicAssignment {
  std::array<Outcome, 4> values{Outcome::plus, Outcome::plus, Outcome::plus, Outcome::plus};

  Outcome a(int j) const { return values[static_cast<std::size_t>(j - 1)]; }
  Outcome b(int k) const { return values[static_cast<std::size_t>(k + 1)]; }

  // Parses four sign characters, e.g. "+-+-" (order a1 a2 b1 b2).
  static DeterministicAssignment parse(std::string_view s) {
    if (s.size() != 4) throw PreconditionError("deterministic assignment needs four signs, got '" + std::string(s) + "'");
    DeterministicAssignment d;
    for (std::size_t i = 0; i < 4; ++i) {
      if (s[i] == '+') d.values[i] = Outcome::plus;
      else if (s[i] == '-') d.values[i] = Outcome::minus;
      else throw PreconditionError("deterministic assignment expects '+' or '-', got '" + std::string(s) + "'");
    }
    return d;
  }

  std::string str() const {
    std::string s;
    for (Outcome o : values) s += o == Outcome::plus ? '+' : '-';
    return s;
  }

  static std::array<DeterministicAssignment, 16> all() {
    std::array<DeterministicAssignment, 16> out{};
    for (unsigned mask = 0; mask < 16; ++mask)
      for (std::size_t i = 0; i < 4; ++i) out[mask].values[i] = (mask >> (3 - i)) & 1u ? Outcome::minus : Outcome::plus;
    return out;
  }
};

/// Popescu-Rohrlich box. Variant 1 puts 1/2 on every free probability and 0
/// on every dependent one (Delta = +4); variant 2 is the reverse (Delta = -4).
inline Behavior pr_box(int variant = 1) {
  if (variant != 1 && variant != 2) throw PreconditionError("PR box variant must be 1 or 2");
  const double on_free = variant == 1 ? 0.5 : 0.0;
  return assemble(FreeSet::filled(on_free), DependentSet::filled(0.5 - on_free));
}

inline Behavior deterministic_box(const DeterministicAssignment& d) {
  Behavior::Values p{};
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k) p[Behavior::index(j, k, d.a(j), d.b(k))] = 1.0;
  return Behavior(p);
}

inline Behavior uniform_box() {
  Behavior::Values p;
  p.fill(0.25);
  return Behavior(p);
}

/// Constant box reaching |Delta| = 2 sqrt 2: (2 + sqrt 2)/8 on the free set and
/// 1/2 minus that on the dependent set (variant 1), or the reverse (variant 2).
inline Behavior quantum_extremal_box(int variant = 1) {
  if (variant != 1 && variant != 2) throw PreconditionError("quantum extremal box variant must be 1 or 2");
  const double hi = (2.0 + std::sqrt(2.0)) / 8.0;
  const double lo = 0.5 - hi;
  return variant == 1 ? assemble(FreeSet::filled(hi), DependentSet::filled(lo))
                      : assemble(FreeSet::filled(lo), DependentSet::filled(hi));
}

/// One of the eight CHSH expressions: +/-(c11 + c12 + c21 + c22 - 2 c_jk).
struct ChshWitness {
  int minus_j = 2;
  int minus_k = 2;
  int sign = +1;
  double value = 0.0;

  std::string expression() const {
    std::string s;
    for (int j = 1; j <= 2; ++j)
      for (int k = 1; k <= 2; ++k) {
        const int coeff = sign * ((j == minus_j && k == minus_k) ? -1 : +1);
        s += (coeff > 0 ? "+c" : "-c") + std::to_string(j) + std::to_string(k);
      }
    return s;
  }
};

inline std::array<ChshWitness, 8> chsh_expressions(const Behavior& b) {
  const auto c = correlations(b);
  const double total = c.c11 + c.c12 + c.c21 + c.c22;
  std::array<ChshWitness, 8> out{};
  std::size_t n = 0;
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      for (int sign : {+1, -1}) {
        const double v = total - 2.0 * c.at(j, k);
        out[n++] = {j, k, sign, sign * v};
      }
  return out;
}

inline ChshWitness strongest_chsh(const Behavior& b) {
  const auto all = chsh_expressions(b);
  ChshWitness best = all[0];
  for (const auto& w : all)
    if (w.value > best.value) best = w;
  return best;
}

struct LocalityResult {
  bool local = false;
  double distance = 0.0;           // max-norm distance to the local polytope
  std::array<double, 16> weights{}; // mixture over DeterministicAssignment::all()
  ChshWitness witness;             // strongest CHSH expression (meaningful when !local)
};

/// Membership in the convex hull of the 16 deterministic boxes.
///
/// Solves  min t  s.t.  |sum_d w_d D_d - b|_inf <= t,  w >= 0,  sum w = 1
/// and declares the behavior local iff t <= tol.
inline LocalityResult is_local(const Behavior& b, double tol = kDefaultTolerance) {
  if (!validate(b, tol).all_pass()) throw PreconditionError("is_local requires a behavior that passes validation");

  const auto dets = DeterministicAssignment::all();
  std::array<Behavior, 16> boxes;
  for (std::size_t d = 0; d < 16; ++d) boxes[d] = deterministic_box(dets[d]);

  // Columns: w0..w15, t, s0..s15, r0..r15.
  constexpr std::size_t kW = 16, kT = 16, kS = 17, kR = 33, kCols = 49;
  std::vector<std::vector<double>> a;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < 16; ++i) {
    std::vector<double> upper(kCols, 0.0), lower(kCols, 0.0);
    for (std::size_t d = 0; d < kW; ++d) upper[d] = lower[d] = boxes[d].values()[i];
    upper[kT] = -1.0;
    upper[kS + i] = 1.0;
    lower[kT] = 1.0;
    lower[kR + i] = -1.0;
    a.push_back(std::move(upper));
    rhs.push_back(b.values()[i]);
    a.push_back(std::move(lower));
    rhs.push_back(b.values()[i]);
  }
  std::vector<double> sum_row(kCols, 0.0);
  for (std::size_t d = 0; d < kW; ++d) sum_row[d] = 1.0;
  a.push_back(std::move(sum_row));
  rhs.push_back(1.0);

  std::vector<double> cost(kCols, 0.0);
  cost[kT] = 1.0;

  const auto lp = detail::solve_lp(std::move(a), std::move(rhs), std::move(cost));
  if (lp.status != detail::LpResult::Status::optimal) throw ConsistencyError("locality program did not reach an optimum");

  LocalityResult out;
  out.distance = lp.objective;
  out.local = lp.objective <= tol;
  for (std::size_t d = 0; d < kW; ++d) out.weights[d] = lp.x[d];
  out.witness = strongest_chsh(b);
  return out;
}

}  // namespace eprb
