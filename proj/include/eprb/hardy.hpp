#pragma once

#include <array>
#include <cmath>
#include <string>

#include "eprb/behavior.hpp"
#include "eprb/errors.hpp"
#include "eprb/linsys.hpp"

namespace eprb {

/// Golden mean and the powers that bound the quantum Hardy probability.
struct GoldenMean {
  static double tau() { return 0.5 * (1.0 + std::sqrt(5.0)); }
  static double inverse_power(int n) { return std::pow(tau(), -n); }
  // Largest Hardy witness probability reachable by a quantum behavior.
  static double hardy_quantum_max() { return inverse_power(5); }
  // |Delta| at the quantum Hardy optimum.
  static double hardy_delta_max() { return 2.0 + 4.0 * hardy_quantum_max(); }
  // Lower end of the quantum window for the complementary sum.
  static double sigma_quantum_min() { return 1.0 - 2.0 * hardy_quantum_max(); }
};

/// Four probabilities supporting a Hardy argument, read off one closed-form
/// relation: the three free probabilities with positive sign (required to
/// vanish) and the dependent probability on the left (the witness). The five
/// free probabilities with negative sign form the complementary sum.
struct HardySet {
  char relation = 'g';  // 'a'..'h', one per dependent probability
  int witness = 13;
  std::array<int, 3> zero_targets{4, 5, 9};
  std::array<int, 5> complement{1, 8, 12, 14, 15};

  std::string id() const { return std::string(1, relation); }

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < 3; ++i) s += (i ? ",p" : "p") + std::to_string(zero_targets[i]);
    return s + " | p" + std::to_string(witness) + "}";
  }

  friend bool operator==(const HardySet&, const HardySet&) = default;
};

inline std::array<HardySet, 8> hardy_sets() {
  std::array<HardySet, 8> out{};
  for (std::size_t r = 0; r < 8; ++r) {
    HardySet s;
    s.relation = static_cast<char>('a' + r);
    s.witness = kDependentIndices[r];
    std::size_t nz = 0, nc = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      if (kClosedForm[r][i] > 0) {
        if (nz == 3) throw ConsistencyError("closed-form relation has more than three positive terms");
        s.zero_targets[nz++] = kFreeIndices[i];
      } else {
        if (nc == 5) throw ConsistencyError("closed-form relation has more than five negative terms");
        s.complement[nc++] = kFreeIndices[i];
      }
    }
    out[r] = s;
  }
  return out;
}

inline HardySet hardy_set(char relation) {
  if (relation < 'a' || relation > 'h') throw PreconditionError(std::string("unknown Hardy set '") + relation + "'");
  return hardy_sets()[static_cast<std::size_t>(relation - 'a')];
}

enum class HardyClass { quantum_consistent, general_probabilistic_only, infeasible };

inline const char* to_string(HardyClass c) {
  switch (c) {
    case HardyClass::quantum_consistent: return "quantum-consistent";
    case HardyClass::general_probabilistic_only: return "general-probabilistic-only";
    case HardyClass::infeasible: return "infeasible";
  }
  return "?";
}

struct HardyReport {
  HardySet set;
  bool premises_satisfied = false;  // all three zero targets <= tol
  double zero_residual = 0.0;       // max of the zero-target values
  double witness = 0.0;
  bool witness_in_causal_range = false;  // 0 <= witness <= 1/2
  double delta_abs = 0.0;
  double delta_identity_residual = 0.0;  // | |Delta| - (2 + 4 witness) |
  double sigma = 0.0;                    // complementary sum
  double sigma_identity_residual = 0.0;  // | sigma - (1 - 2 witness) |
  HardyClass classification = HardyClass::infeasible;
};

// "quantum-consistent" means the witness does not exceed the quantum Hardy
// maximum. That is necessary for a quantum behavior, not sufficient.
inline HardyClass classify_witness(double witness, double tol) {
  if (witness <= GoldenMean::hardy_quantum_max() + tol) return HardyClass::quantum_consistent;
  if (witness <= 0.5 + tol) return HardyClass::general_probabilistic_only;
  return HardyClass::infeasible;
}

/// Hardy analysis of `b` for one set.
///
/// Under the three-zeros premise every set satisfies the same pair of
/// identities as the p13 set, |Delta| = 2 + 4 w and sigma = 1 - 2 w, since
/// each relation carries three positive and five negative free terms and the
/// free-set sum fixes Delta. Numeric fields are filled even when the premise
/// fails.
inline HardyReport analyze(const Behavior& b, const HardySet& set, double tol = kDefaultTolerance) {
  if (!validate(b, tol).all_pass()) throw PreconditionError("Hardy analysis requires a behavior that passes validation");

  HardyReport r;
  r.set = set;
  for (int z : set.zero_targets) r.zero_residual = std::max(r.zero_residual, std::abs(b.p(z)));
  r.premises_satisfied = r.zero_residual <= tol;
  r.witness = b.p(set.witness);
  r.witness_in_causal_range = r.witness >= -tol && r.witness <= 0.5 + tol;
  r.delta_abs = std::abs(chsh_forms(b).from_correlations);
  r.delta_identity_residual = std::abs(r.delta_abs - (2.0 + 4.0 * r.witness));
  for (int c : set.complement) r.sigma += b.p(c);
  r.sigma_identity_residual = std::abs(r.sigma - (1.0 - 2.0 * r.witness));
  r.classification = classify_witness(r.witness, tol);
  return r;
}

inline std::array<HardyReport, 8> analyze_all(const Behavior& b, double tol = kDefaultTolerance) {
  std::array<HardyReport, 8> out{};
  const auto sets = hardy_sets();
  for (std::size_t i = 0; i < 8; ++i) out[i] = analyze(b, sets[i], tol);
  return out;
}

/// Clauser-Horne type violation: witness minus the sum of the zero targets.
/// Positive means the inequality witness <= sum(zero targets) is violated.
inline double ch_inequality(const Behavior& b, const HardySet& set) {
  double s = 0.0;
  for (int z : set.zero_targets) s += b.p(z);
  return b.p(set.witness) - s;
}

// (|Delta| - 2) / 2
inline double normalized_chsh_violation(const Behavior& b) { return (std::abs(chsh_forms(b).from_correlations) - 2.0) / 2.0; }

}  // namespace eprb
