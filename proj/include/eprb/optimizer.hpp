#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "eprb/behavior.hpp"
#include "eprb/detail/nelder_mead.hpp"
#include "eprb/errors.hpp"
#include "eprb/quantum.hpp"

namespace eprb {

enum class StateClass { any, product, maximally_entangled };

inline const char* to_string(StateClass c) {
  switch (c) {
    case StateClass::any: return "any";
    case StateClass::product: return "product";
    case StateClass::maximally_entangled: return "maximally_entangled";
  }
  return "?";
}

struct OptimizationConfig {
  std::size_t restarts = 32;
  std::size_t max_iters = 4000;     // per local search
  double tol = 1e-13;               // objective spread, relative to 1 + |f|
  double xtol = 1e-9;               // simplex diameter in radians
  double penalty_start = 1e3;
  double penalty_growth = 2.0;
  double penalty_cap = 1e9;
  double feasibility_tol = 1e-8;    // largest accepted constraint residual
  std::uint64_t seed = 20000924;
  unsigned threads = 1;

  void validate() const {
    if (restarts < 1) throw PreconditionError("restarts must be at least 1");
    if (max_iters < 1) throw PreconditionError("max_iters must be at least 1");
    if (!(tol > 0.0) || !(xtol > 0.0)) throw PreconditionError("tolerances must be positive");
    if (!(penalty_start > 0.0) || !(penalty_growth > 1.0) || !(penalty_cap >= penalty_start))
      throw PreconditionError("penalty schedule must start positive and strictly increase");
    if (!(feasibility_tol > 0.0)) throw PreconditionError("feasibility_tol must be positive");
    if (threads < 1) throw PreconditionError("threads must be at least 1");
  }

  // Strictly increasing weights ending exactly at the cap.
  std::vector<double> penalty_schedule() const {
    std::vector<double> w;
    for (double x = penalty_start; x < penalty_cap; x *= penalty_growth) w.push_back(x);
    w.push_back(penalty_cap);
    return w;
  }
};

/// Schmidt angle and four measurement angles in the x-z plane.
struct ModelParameters {
  double theta = 0.0;                 // cos(theta)|00> + sin(theta)|11>, in [0, pi/4]
  std::array<double, 4> angles{};     // a1, a2, b1, b2, in [0, 2 pi)

  template <class Real = double>
  BasicQuantumModel<Real> model() const {
    typename BasicQuantumModel<Real>::Settings s;
    s.a1 = planar_direction<Real>(angles[0]);
    s.a2 = planar_direction<Real>(angles[1]);
    s.b1 = planar_direction<Real>(angles[2]);
    s.b2 = planar_direction<Real>(angles[3]);
    return BasicQuantumModel<Real>(schmidt_state<Real>(static_cast<Real>(theta)), s);
  }
};

/// p(index) = target. Zero targets are penalized through the squared
/// projection amplitude, other targets through the squared difference.
struct ProbabilityConstraint {
  int index = 13;
  double target = 0.0;

  std::string name() const {
    std::string t = std::to_string(target);
    t.erase(t.find_last_not_of('0') + 1);
    if (!t.empty() && t.back() == '.') t.pop_back();
    return "p" + std::to_string(index) + "=" + t;
  }
};

struct ConstraintResidual {
  std::string name;
  double value = 0.0;
};

struct OptimizationResult {
  double objective = 0.0;
  ModelParameters parameters;
  Behavior behavior;
  std::vector<ConstraintResidual> residuals;
  double max_residual = 0.0;
  double delta = 0.0;   // signed CHSH sum at the optimum
  double sigma = 0.0;   // p1 + p8 + p12 + p14 + p15 at the optimum
  std::size_t restarts = 0;
  std::size_t feasible_restarts = 0;
  std::size_t converged_restarts = 0;
  std::size_t best_restart = 0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;

  QuantumModel model() const { return parameters.model<double>(); }
};

/// Maximization of a behavior functional over ModelParameters.
struct OptimizationProblem {
  std::function<double(const Behavior&)> objective;
  std::vector<ProbabilityConstraint> constraints;
  std::optional<double> fixed_theta;        // search theta when empty
  std::optional<ModelParameters> start;     // starting point of restart 0
};

namespace detail {

inline constexpr double kQuarterPi = std::numbers::pi / 4.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Folds any real onto [0, pi/4] as a triangle wave; the map is continuous so
// the local search stays unconstrained.
inline double fold_theta(double t) {
  double u = std::fmod(t, 2.0 * kQuarterPi);
  if (u < 0.0) u += 2.0 * kQuarterPi;
  return u <= kQuarterPi ? u : 2.0 * kQuarterPi - u;
}

inline double wrap_angle(double a) {
  double u = std::fmod(a, kTwoPi);
  if (u < 0.0) u += kTwoPi;
  return u;
}

class SearchSpace {
 public:
  explicit SearchSpace(std::optional<double> fixed_theta) : fixed_theta_(fixed_theta) {}

  std::size_t dimension() const { return fixed_theta_ ? 4 : 5; }

  ModelParameters decode(const std::vector<double>& x) const {
    ModelParameters p;
    const std::size_t off = fixed_theta_ ? 0 : 1;
    p.theta = fixed_theta_ ? *fixed_theta_ : fold_theta(x[0]);
    for (std::size_t i = 0; i < 4; ++i) p.angles[i] = wrap_angle(x[off + i]);
    return p;
  }

  std::vector<double> encode(const ModelParameters& p) const {
    std::vector<double> x;
    if (!fixed_theta_) x.push_back(p.theta);
    x.insert(x.end(), p.angles.begin(), p.angles.end());
    return x;
  }

  template <class Rng>
  std::vector<double> random_point(Rng& rng) const {
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<double> x;
    if (!fixed_theta_) x.push_back(kQuarterPi * unit());
    for (int i = 0; i < 4; ++i) x.push_back(kTwoPi * unit());
    return x;
  }

 private:
  std::optional<double> fixed_theta_;
};

struct RestartOutcome {
  ModelParameters params;
  double objective = 0.0;
  double max_residual = 0.0;
  bool local_converged = false;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
};

inline double constraint_residual(const Behavior& b, const ProbabilityConstraint& c) {
  return std::abs(b.p(c.index) - c.target);
}

inline RestartOutcome run_restart(const OptimizationProblem& problem, const OptimizationConfig& cfg,
                                  std::size_t restart_index) {
  const SearchSpace space(problem.fixed_theta);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(restart_index)};
  std::mt19937_64 rng(seq);
  std::vector<double> x = (restart_index == 0 && problem.start) ? space.encode(*problem.start) : space.random_point(rng);

  // Resolve constraint indices to Born amplitudes once per evaluation.
  struct Addr {
    int j, k;
    Outcome m, n;
  };
  std::vector<Addr> addr;
  for (const auto& c : problem.constraints) {
    const int i = c.index - 1;
    addr.push_back({i / 8 + 1, (i / 4) % 2 + 1, (i / 2) % 2 == 0 ? Outcome::plus : Outcome::minus,
                    i % 2 == 0 ? Outcome::plus : Outcome::minus});
  }

  double weight = 0.0;
  auto penalized = [&](const std::vector<double>& v) {
    const QuantumModel model = space.decode(v).model<double>();
    const Behavior b = behavior_from_model(model);
    double f = -problem.objective(b);
    for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
      const auto& c = problem.constraints[i];
      if (c.target == 0.0) {
        f += weight * projection_amplitude(model, addr[i].j, addr[i].k, addr[i].m, addr[i].n).norm2();
      } else {
        const double d = b.p(c.index) - c.target;
        f += weight * d * d;
      }
    }
    return f;
  };

  RestartOutcome out;
  NelderMeadOptions opt;
  opt.max_iters = cfg.max_iters;
  opt.ftol = cfg.tol;
  opt.xtol = cfg.xtol;
  auto local = [&](double step) {
    opt.initial_step = step;
    const auto r = nelder_mead(penalized, x, opt);
    out.evaluations += r.evaluations;
    out.iterations += r.iterations;
    out.local_converged = r.converged;
    const bool improved = r.f < penalized(x) - cfg.tol * (1.0 + std::abs(r.f));
    x = r.x;
    return improved;
  };

  if (problem.constraints.empty()) {
    local(0.5);
    for (double step : {0.05, 5e-3, 5e-4})
      if (!local(step)) break;
  } else {
    const auto schedule = cfg.penalty_schedule();
    for (std::size_t s = 0; s < schedule.size(); ++s) {
      weight = schedule[s];
      local(s == 0 ? 0.5 : 0.02);
    }
    for (double step : {5e-3, 5e-4, 5e-5}) local(step);
  }

  // Final figures from a long double evaluation of the same point.
  out.params = space.decode(x);
  const Behavior b = behavior_from_model(out.params.model<long double>());
  out.objective = problem.objective(b);
  for (const auto& c : problem.constraints) out.max_residual = std::max(out.max_residual, constraint_residual(b, c));
  return out;
}

}  // namespace detail

/// Multi-start penalized simplex search. Restarts are independent and seeded
/// from (cfg.seed, restart index), so results do not depend on cfg.threads.
/// The winner is the feasible restart with the largest objective, ties going
/// to the lowest index; with no feasible restart the best infeasible one is
/// returned and the result is flagged unconverged.
inline OptimizationResult optimize(const OptimizationProblem& problem, const OptimizationConfig& cfg) {
  cfg.validate();
  std::vector<detail::RestartOutcome> runs(cfg.restarts);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.threads, cfg.restarts));
  if (workers <= 1) {
    for (std::size_t r = 0; r < cfg.restarts; ++r) runs[r] = detail::run_restart(problem, cfg, r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < cfg.restarts; r += workers) runs[r] = detail::run_restart(problem, cfg, r);
      });
    for (auto& t : pool) t.join();
  }

  OptimizationResult res;
  res.restarts = cfg.restarts;
  std::optional<std::size_t> best_feasible, best_any;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    res.evaluations += run.evaluations;
    res.iterations += run.iterations;
    const bool feasible = run.max_residual <= cfg.feasibility_tol;
    if (feasible) ++res.feasible_restarts;
    if (feasible && run.local_converged) ++res.converged_restarts;
    if (!best_any || run.objective > runs[*best_any].objective) best_any = r;
    if (feasible && (!best_feasible || run.objective > runs[*best_feasible].objective)) best_feasible = r;
  }
  res.best_restart = best_feasible ? *best_feasible : *best_any;
  const auto& best = runs[res.best_restart];
  res.converged = best_feasible.has_value() && best.local_converged;

  res.parameters = best.params;
  res.behavior = behavior_from_model(best.params.model<long double>());
  res.objective = best.objective;
  for (const auto& c : problem.constraints)
    res.residuals.push_back({c.name(), detail::constraint_residual(res.behavior, c)});
  res.max_residual = best.max_residual;
  res.delta = chsh_forms(res.behavior).from_correlations;
  res.sigma = res.behavior.p(1) + res.behavior.p(8) + res.behavior.p(12) + res.behavior.p(14) + res.behavior.p(15);
  return res;
}

inline std::optional<double> theta_for(StateClass c) {
  switch (c) {
    case StateClass::any: return std::nullopt;
    case StateClass::product: return 0.0;
    case StateClass::maximally_entangled: return detail::kQuarterPi;
  }
  return std::nullopt;
}

/// Largest signed CHSH sum reachable within the state class.
inline OptimizationResult maximize_chsh(StateClass state_class, const OptimizationConfig& cfg = {}) {
  OptimizationProblem p;
  p.objective = [](const Behavior& b) { return chsh_delta(b); };
  p.fixed_theta = theta_for(state_class);
  return optimize(p, cfg);
}

/// Largest p13 subject to p4 = p5 = p9 = 0.
inline OptimizationResult maximize_hardy(const OptimizationConfig& cfg = {}, std::optional<double> fixed_theta = {},
                                         std::optional<ModelParameters> start = {}) {
  OptimizationProblem p;
  p.objective = [](const Behavior& b) { return b.p(13); };
  p.constraints = {{4, 0.0}, {5, 0.0}, {9, 0.0}};
  p.fixed_theta = fixed_theta;
  p.start = start;
  return optimize(p, cfg);
}

/// maximize_hardy restricted to the maximally entangled state.
inline OptimizationResult maximize_hardy_maxent(const OptimizationConfig& cfg = {}) {
  return maximize_hardy(cfg, detail::kQuarterPi);
}

/// Largest p14 + p15 subject to p1 = p4 = p5 = p8 = p9 = p12 = target.
/// Restart 0 starts from the maximally entangled state with all four
/// directions along z, which is feasible for target 1/2.
inline OptimizationResult ghz_impossibility(const OptimizationConfig& cfg = {}, double target = 0.5) {
  OptimizationProblem p;
  p.objective = [](const Behavior& b) { return b.p(14) + b.p(15); };
  for (int i : {1, 4, 5, 8, 9, 12}) p.constraints.push_back({i, target});
  ModelParameters aligned;
  aligned.theta = detail::kQuarterPi;
  p.start = aligned;
  return optimize(p, cfg);
}

}  // namespace eprb
