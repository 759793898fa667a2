#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eprb {

struct Check {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
};

// Ordered list of named checks. A check passes iff residual <= tolerance;
// a NaN residual always fails.
class ConstraintReport {
 public:
  void add(std::string name, double residual, double tolerance) {
    residual = std::abs(residual);
    const bool pass = residual <= tolerance;
    checks_.push_back({std::move(name), pass, residual, tolerance});
  }

  void append(const ConstraintReport& other) {
    checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
  }

  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.pass; });
  }

  std::vector<Check> failures() const {
    std::vector<Check> out;
    std::copy_if(checks_.begin(), checks_.end(), std::back_inserter(out),
                 [](const Check& c) { return !c.pass; });
    return out;
  }

  double max_residual() const {
    double m = 0.0;
    for (const auto& c : checks_) m = std::max(m, c.residual);
    return m;
  }

  const Check* find(std::string_view name) const {
    auto it = std::find_if(checks_.begin(), checks_.end(),
                           [&](const Check& c) { return c.name == name; });
    return it == checks_.end() ? nullptr : &*it;
  }

  std::size_t size() const { return checks_.size(); }
  const std::vector<Check>& checks() const { return checks_; }
  auto begin() const { return checks_.begin(); }
  auto end() const { return checks_.end(); }

 private:
  std::vector<Check> checks_;
};

}  // namespace eprb
