#pragma once

// JSON encodings for the library types.

#include <array>
#include <string>

#include "json.hpp"

#include "eprb/behavior.hpp"
#include "eprb/boxes.hpp"
#include "eprb/errors.hpp"
#include "eprb/hardy.hpp"
#include "eprb/linsys.hpp"
#include "eprb/optimizer.hpp"
#include "eprb/quantum.hpp"
#include "eprb/report.hpp"

namespace eprb::io {

using nlohmann::json;

inline constexpr std::array<const char*, 4> kOutcomeKeys = {"pp", "pm", "mp", "mm"};

namespace detail {

inline double number_at(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw StructuralError(where + " must be a JSON object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw StructuralError(where + " is missing \"" + key + "\"");
  if (!it->is_number()) throw StructuralError(where + "." + key + " must be a number");
  return it->get<double>();
}

template <class Octet>
Octet octet_from_json(const json& j, const std::string& what) {
  Octet out;
  for (int p : Octet::indices()) out.set(p, number_at(j, "p" + std::to_string(p), what));
  return out;
}

template <class Octet>
json octet_to_json(const Octet& o) {
  json j = json::object();
  for (int p : Octet::indices()) j["p" + std::to_string(p)] = o.get(p);
  return j;
}

inline json vec3_to_json(const Vec3<double>& v) { return json::array({v[0], v[1], v[2]}); }

inline Vec3<double> vec3_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw StructuralError(where + " must be an array of 3 numbers");
  Vec3<double> v{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw StructuralError(where + " must be an array of 3 numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

}  // namespace detail

/// Block form plus a flat p1..p16 echo under "flat".
inline json to_json(const Behavior& b) {
  json blocks = json::array();
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k) {
      const auto blk = b.block(j, k);
      json o = json::object();
      for (std::size_t i = 0; i < 4; ++i) o[kOutcomeKeys[i]] = blk[i];
      blocks.push_back(o);
    }
  json flat = json::object();
  for (int i = 1; i <= 16; ++i) flat["p" + std::to_string(i)] = b.p(i);
  return {{"blocks", blocks}, {"flat", flat}};
}

/// Accepts {"blocks": [4 x {pp,pm,mp,mm}]} (ordered a1b1, a1b2, a2b1, a2b2)
/// or the flat form {"p1": .., .., "p16": ..}. The block form wins when both
/// are present.
inline Behavior behavior_from_json(const json& j) {
  if (!j.is_object()) throw StructuralError("behavior must be a JSON object");
  if (j.contains("blocks")) {
    const json& blocks = j.at("blocks");
    if (!blocks.is_array() || blocks.size() != 4) throw StructuralError("\"blocks\" must be an array of 4 objects");
    std::array<Behavior::Block, 4> out{};
    for (std::size_t blk = 0; blk < 4; ++blk)
      for (std::size_t i = 0; i < 4; ++i)
        out[blk][i] = detail::number_at(blocks[blk], kOutcomeKeys[i], "blocks[" + std::to_string(blk) + "]");
    return Behavior::from_blocks(out);
  }
  Behavior::Values p{};
  for (int i = 1; i <= 16; ++i) p[static_cast<std::size_t>(i - 1)] = detail::number_at(j, "p" + std::to_string(i), "behavior");
  return Behavior(p);
}

inline json to_json(const FreeSet& u) { return detail::octet_to_json(u); }
inline json to_json(const DependentSet& v) { return detail::octet_to_json(v); }
inline FreeSet free_set_from_json(const json& j) { return detail::octet_from_json<FreeSet>(j, "free set"); }
inline DependentSet dependent_set_from_json(const json& j) {
  return detail::octet_from_json<DependentSet>(j, "dependent set");
}

inline json to_json(const CorrelationVector& c) {
  return {{"c11", c.c11}, {"c12", c.c12}, {"c21", c.c21}, {"c22", c.c22}};
}

inline json to_json(const ConstraintReport& r) {
  json checks = json::array();
  for (const auto& c : r)
    checks.push_back(
        {{"name", c.name}, {"status", c.pass ? "pass" : "fail"}, {"residual", c.residual}, {"tolerance", c.tolerance}});
  return {{"all_pass", r.all_pass()}, {"max_residual", r.max_residual()}, {"checks", checks}};
}

inline json to_json(const QuantumModel& m) {
  json re = json::array(), im = json::array();
  for (const auto& a : m.state()) {
    re.push_back(a.re);
    im.push_back(a.im);
  }
  const auto& s = m.settings();
  return {{"state", {{"re", re}, {"im", im}}},
          {"settings",
           {{"a1", detail::vec3_to_json(s.a1)},
            {"a2", detail::vec3_to_json(s.a2)},
            {"b1", detail::vec3_to_json(s.b1)},
            {"b2", detail::vec3_to_json(s.b2)}}}};
}

inline QuantumModel quantum_model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("state") || !j.contains("settings"))
    throw StructuralError("quantum model needs \"state\" and \"settings\"");
  const json& st = j.at("state");
  if (!st.is_object() || !st.contains("re") || !st.contains("im")) throw StructuralError("state needs \"re\" and \"im\"");
  const json& re = st.at("re");
  const json& im = st.at("im");
  if (!re.is_array() || !im.is_array() || re.size() != 4 || im.size() != 4)
    throw StructuralError("state.re and state.im must be arrays of 4 numbers");
  QuantumModel::State state;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!re[i].is_number() || !im[i].is_number()) throw StructuralError("state amplitudes must be numbers");
    state[i] = Complex(re[i].get<double>(), im[i].get<double>());
  }
  const json& s = j.at("settings");
  if (!s.is_object()) throw StructuralError("settings must be an object");
  QuantumModel::Settings settings;
  auto dir = [&](const char* key) {
    if (!s.contains(key)) throw StructuralError(std::string("settings is missing \"") + key + "\"");
    return detail::vec3_from_json(s.at(key), std::string("settings.") + key);
  };
  settings.a1 = dir("a1");
  settings.a2 = dir("a2");
  settings.b1 = dir("b1");
  settings.b2 = dir("b2");
  return QuantumModel(state, settings);
}

inline json to_json(const HardySet& s) {
  return {{"id", s.id()},
          {"zero_targets", json::array({"p" + std::to_string(s.zero_targets[0]), "p" + std::to_string(s.zero_targets[1]),
                                        "p" + std::to_string(s.zero_targets[2])})},
          {"witness", "p" + std::to_string(s.witness)}};
}

inline json to_json(const HardyReport& r) {
  return {{"set", to_json(r.set)},
          {"premises_satisfied", r.premises_satisfied},
          {"zero_residual", r.zero_residual},
          {"witness", r.witness},
          {"witness_in_causal_range", r.witness_in_causal_range},
          {"delta_abs", r.delta_abs},
          {"delta_identity_residual", r.delta_identity_residual},
          {"sigma", r.sigma},
          {"sigma_identity_residual", r.sigma_identity_residual},
          {"classification", to_string(r.classification)}};
}

inline json to_json(const ChshWitness& w) { return {{"expression", w.expression()}, {"value", w.value}}; }

inline json to_json(const LocalityResult& l) {
  json weights = json::object();
  const auto dets = DeterministicAssignment::all();
  for (std::size_t d = 0; d < 16; ++d)
    if (l.weights[d] > 0.0) weights[dets[d].str()] = l.weights[d];
  json j = {{"local", l.local}, {"distance", l.distance}, {"weights", weights}};
  if (!l.local) j["witness"] = to_json(l.witness);
  return j;
}

inline json to_json(const ModelParameters& p) {
  return {{"theta", p.theta}, {"angles", {{"a1", p.angles[0]}, {"a2", p.angles[1]}, {"b1", p.angles[2]}, {"b2", p.angles[3]}}}};
}

inline json to_json(const OptimizationResult& r) {
  json residuals = json::object();
  for (const auto& c : r.residuals) residuals[c.name] = c.value;
  return {{"objective", r.objective},
          {"converged", r.converged},
          {"parameters", to_json(r.parameters)},
          {"model", to_json(r.model())},
          {"behavior", to_json(r.behavior)},
          {"residuals", residuals},
          {"max_residual", r.max_residual},
          {"delta", r.delta},
          {"sigma", r.sigma},
          {"stats",
           {{"restarts", r.restarts},
            {"feasible_restarts", r.feasible_restarts},
            {"converged_restarts", r.converged_restarts},
            {"best_restart", r.best_restart},
            {"evaluations", r.evaluations},
            {"iterations", r.iterations}}}};
}

/// Overrides fields of `base` from {"restarts", "max_iters", "tol", "seed",
/// "threads", "feasibility_tol", "penalty_start", "penalty_growth",
/// "penalty_cap"}; unknown keys are rejected.
inline OptimizationConfig config_from_json(const json& j, OptimizationConfig base = {}) {
  if (!j.is_object()) throw StructuralError("optimizer config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw StructuralError("optimizer config \"" + key + "\" must be a number");
    auto count = [&] {
      if (!value.is_number_integer() || value.get<long long>() < 0)
        throw StructuralError("optimizer config \"" + key + "\" must be a non-negative integer");
      return value.get<unsigned long long>();
    };
    if (key == "restarts") base.restarts = count();
    else if (key == "max_iters") base.max_iters = count();
    else if (key == "seed") base.seed = count();
    else if (key == "threads") base.threads = static_cast<unsigned>(count());
    else if (key == "tol") base.tol = value.get<double>();
    else if (key == "feasibility_tol") base.feasibility_tol = value.get<double>();
    else if (key == "penalty_start") base.penalty_start = value.get<double>();
    else if (key == "penalty_growth") base.penalty_growth = value.get<double>();
    else if (key == "penalty_cap") base.penalty_cap = value.get<double>();
    else throw StructuralError("unknown optimizer config key \"" + key + "\"");
  }
  base.validate();
  return base;
}

inline json to_json(const OptimizationConfig& c) {
  return {{"restarts", c.restarts}, {"max_iters", c.max_iters}, {"tol", c.tol}, {"seed", c.seed}, {"threads", c.threads},
          {"feasibility_tol", c.feasibility_tol}, {"penalty_start", c.penalty_start},
          {"penalty_growth", c.penalty_growth}, {"penalty_cap", c.penalty_cap}};
}

}  // namespace eprb::io
