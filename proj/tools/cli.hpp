#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "eprb/optimizer.hpp"

namespace eprb::cli {

// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kViolation = 2, kNonConvergence = 3 };

struct OutputOptions {
  bool json = false;
  std::string out_path;  // empty: standard output
};

struct OptimizerOptions {
  std::string config_path;
  std::optional<std::size_t> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  OptimizationConfig resolve() const;
};

int cmd_check(const std::string& path, double tol, const OutputOptions& o, std::ostream& out, std::ostream& err);
int cmd_solve(const std::string& path, double tol, bool exhaustive, const OutputOptions& o, std::ostream& out,
              std::ostream& err);
int cmd_scan(double theta_min, double theta_max, std::size_t steps, const OptimizerOptions& opt,
             const OutputOptions& o, std::ostream& out, std::ostream& err);
int cmd_box(const std::string& name, const OutputOptions& o, std::ostream& out, std::ostream& err);
int cmd_chsh(const std::string& path, const OutputOptions& o, std::ostream& out, std::ostream& err);
int cmd_hardy(const std::string& path, double tol, const OutputOptions& o, std::ostream& out, std::ostream& err);
int cmd_optimize(const std::string& problem, const std::string& state_class, double ghz_target,
                 const OptimizerOptions& opt, const OutputOptions& o, std::ostream& out, std::ostream& err);
int cmd_rank(const OutputOptions& o, std::ostream& out, std::ostream& err);

// Parses argv and dispatches; "-" as a path reads standard input.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eprb::cli
