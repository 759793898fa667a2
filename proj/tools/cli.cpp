#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "CLI11.hpp"
#include "eprb/boxes.hpp"
#include "eprb/hardy.hpp"
#include "eprb/io.hpp"
#include "eprb/linsys.hpp"

namespace eprb::cli {
namespace {

using nlohmann::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_input(path));
  } catch (const json::parse_error& e) {
    throw StructuralError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void emit(const OutputOptions& o, std::ostream& out, const std::string& text) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out_path);
  if (!f) throw IoError("cannot write '" + o.out_path + "'");
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double x, int precision = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  return buf;
}

// Maps library and I/O failures onto exit codes; precondition failures are
// treated as constraint violations only where `violation_on_precondition`.
template <class F>
int guarded(std::ostream& err, F&& body, bool violation_on_precondition = false) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return violation_on_precondition ? kViolation : kUsage;
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << "\n";
    return kViolation;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

std::string report_table(const ConstraintReport& r) {
  std::ostringstream s;
  s << std::left << std::setw(34) << "check" << std::setw(8) << "status" << std::setw(16) << "residual"
    << "tolerance\n";
  for (const auto& c : r)
    s << std::left << std::setw(34) << c.name << std::setw(8) << (c.pass ? "pass" : "FAIL") << std::setw(16)
      << fmt(c.residual, 6) << fmt(c.tolerance, 3) << "\n";
  return s.str();
}

std::string hardy_line(const HardyReport& r) {
  std::ostringstream s;
  s << "hardy " << r.set.id() << " " << r.set.str() << ": ";
  if (!r.premises_satisfied) s << "premises not satisfied (zero residual " << fmt(r.zero_residual, 6) << "), ";
  s << "witness " << fmt(r.witness) << ", |delta| " << fmt(r.delta_abs) << ", sigma " << fmt(r.sigma);
  if (r.premises_satisfied)
    s << ", " << to_string(r.classification) << ", identity residuals " << fmt(r.delta_identity_residual, 3) << " / "
      << fmt(r.sigma_identity_residual, 3);
  return s.str() + "\n";
}

std::string locality_line(const LocalityResult& l) {
  if (l.local) return "locality: local (distance " + fmt(l.distance, 3) + ")\n";
  return "locality: non-local (distance " + fmt(l.distance, 6) + "), witness " + l.witness.expression() + " = " +
         fmt(l.witness.value) + " > 2\n";
}

Behavior box_by_name(const std::string& name) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  auto variant = [&] {
    if (arg.empty() || arg == "1") return 1;
    if (arg == "2") return 2;
    throw PreconditionError("unknown variant '" + arg + "' for box '" + head + "'");
  };
  if (head == "pr") return pr_box(variant());
  if (head == "qextremal") return quantum_extremal_box(variant());
  if (head == "uniform" && arg.empty()) return uniform_box();
  if (head == "det") return deterministic_box(DeterministicAssignment::parse(arg));
  throw PreconditionError("unknown box '" + name + "' (expected pr[:1|2], uniform, det:<4 signs>, qextremal[:1|2])");
}

std::string optimization_text(const std::string& title, const OptimizationResult& r) {
  std::ostringstream s;
  s << title << "\n";
  s << "  objective        " << fmt(r.objective, 12) << (r.converged ? "" : "  (NOT CONVERGED)") << "\n";
  s << "  theta            " << fmt(r.parameters.theta, 12) << "\n";
  s << "  angles a1 a2 b1 b2";
  for (double a : r.parameters.angles) s << " " << fmt(a, 10);
  s << "\n";
  s << "  delta            " << fmt(r.delta, 12) << "\n";
  s << "  sigma            " << fmt(r.sigma, 12) << "\n";
  for (const auto& c : r.residuals) s << "  residual " << std::left << std::setw(8) << c.name << fmt(c.value, 3) << "\n";
  s << "  behavior        ";
  for (int i = 1; i <= 16; ++i) s << " p" << i << "=" << fmt(r.behavior.p(i), 8);
  s << "\n";
  s << "  restarts " << r.restarts << " (feasible " << r.feasible_restarts << ", converged " << r.converged_restarts
    << ", best #" << r.best_restart << "), evaluations " << r.evaluations << "\n";
  return s.str();
}

}  // namespace

OptimizationConfig OptimizerOptions::resolve() const {
  OptimizationConfig cfg;
  if (!config_path.empty()) cfg = io::config_from_json(read_json(config_path), cfg);
  if (restarts) cfg.restarts = *restarts;
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  cfg.validate();
  return cfg;
}

int cmd_check(const std::string& path, double tol, const OutputOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Behavior b = io::behavior_from_json(read_json(path));
    const ConstraintReport report = validate(b, tol);
    const bool ok = report.all_pass();
    json j = {{"validation", io::to_json(report)}};
    std::string text = report_table(report);
    if (ok) {
      const auto loc = is_local(b, tol);
      j["locality"] = io::to_json(loc);
      text += locality_line(loc);
      json hardy = json::array();
      for (const auto& h : analyze_all(b, tol)) {
        hardy.push_back(io::to_json(h));
        text += hardy_line(h);
      }
      j["hardy"] = hardy;
      j["delta"] = chsh_forms(b).from_correlations;
      text += "delta: " + fmt(chsh_forms(b).from_correlations) + "\n";
    }
    text += ok ? "constraints: all pass\n" : "constraints: VIOLATED\n";
    emit(o, out, o.json ? dump(j) : text);
    return ok ? kOk : kViolation;
  });
}

int cmd_solve(const std::string& path, double tol, bool exhaustive, const OutputOptions& o, std::ostream& out,
              std::ostream& err) {
  return guarded(
      err,
      [&] {
        const FreeSet u = io::free_set_from_json(read_json(path));
        const DependentSet v = solve_dependent(u);
        const ConstraintReport report = check_feasible(u, tol, exhaustive);
        if (o.json) {
          emit(o, out, dump({{"dependent", io::to_json(v)}, {"feasibility", io::to_json(report)}}));
        } else {
          std::string text = "dependent set:\n";
          for (int p : DependentSet::indices()) text += "  p" + std::to_string(p) + " = " + fmt(v.get(p), 12) + "\n";
          text += report_table(report);
          text += report.all_pass() ? "feasible\n" : "INFEASIBLE\n";
          emit(o, out, text);
        }
        return report.all_pass() ? kOk : kViolation;
      },
      /*violation_on_precondition=*/true);
}

int cmd_scan(double theta_min, double theta_max, std::size_t steps, const OptimizerOptions& opt,
             const OutputOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (steps < 2) throw PreconditionError("scan needs at least 2 steps");
    const double quarter = std::numbers::pi / 4.0;
    if (!(theta_min >= 0.0 && theta_max <= quarter + 1e-12 && theta_min <= theta_max))
      throw PreconditionError("scan range must lie within [0, pi/4]");
    const OptimizationConfig cfg = opt.resolve();
    std::ostringstream csv;
    csv << "theta,p13,delta,sigma,status\n";
    bool all_converged = true;
    for (std::size_t i = 0; i < steps; ++i) {
      const double theta =
          std::min(quarter, theta_min + (theta_max - theta_min) * static_cast<double>(i) / static_cast<double>(steps - 1));
      const auto r = maximize_hardy(cfg, theta);
      all_converged = all_converged && r.converged;
      char row[160];
      std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g,%.17g,%s\n", theta, r.objective, std::abs(r.delta), r.sigma,
                    r.converged ? "ok" : "nonconverged");
      csv << row;
    }
    emit(o, out, csv.str());
    return all_converged ? kOk : kNonConvergence;
  });
}

int cmd_box(const std::string& name, const OutputOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    emit(o, out, dump(io::to_json(box_by_name(name))));
    return kOk;
  });
}

int cmd_chsh(const std::string& path, const OutputOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Behavior b = io::behavior_from_json(read_json(path));
    const auto c = correlations(b);
    const auto forms = chsh_forms(b);
    const double delta = chsh_delta(b);
    if (o.json) {
      emit(o, out,
           dump({{"correlations", io::to_json(c)},
                 {"delta", delta},
                 {"delta_from_probabilities", forms.from_probabilities},
                 {"strongest", io::to_json(strongest_chsh(b))}}));
    } else {
      emit(o, out,
           "c11 " + fmt(c.c11) + "\nc12 " + fmt(c.c12) + "\nc21 " + fmt(c.c21) + "\nc22 " + fmt(c.c22) + "\ndelta " +
               fmt(delta) + "\n");
    }
    return kOk;
  });
}

int cmd_hardy(const std::string& path, double tol, const OutputOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Behavior b = io::behavior_from_json(read_json(path));
    const ConstraintReport report = validate(b, tol);
    if (!report.all_pass()) {
      err << report_table(report) << "behavior fails validation; Hardy analysis skipped\n";
      return kViolation;
    }
    json arr = json::array();
    std::string text;
    for (const auto& h : analyze_all(b, tol)) {
      arr.push_back(io::to_json(h));
      text += hardy_line(h);
    }
    emit(o, out, o.json ? dump(arr) : text);
    return kOk;
  });
}

int cmd_optimize(const std::string& problem, const std::string& state_class, double ghz_target,
                 const OptimizerOptions& opt, const OutputOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    StateClass sc;
    if (state_class == "any") sc = StateClass::any;
    else if (state_class == "product") sc = StateClass::product;
    else if (state_class == "maxent" || state_class == "maximally_entangled") sc = StateClass::maximally_entangled;
    else throw PreconditionError("unknown state class '" + state_class + "'");

    const OptimizationConfig cfg = opt.resolve();
    OptimizationResult r;
    if (problem == "chsh") {
      r = maximize_chsh(sc, cfg);
    } else if (problem == "hardy") {
      r = sc == StateClass::maximally_entangled ? maximize_hardy_maxent(cfg) : maximize_hardy(cfg, theta_for(sc));
    } else if (problem == "ghz") {
      if (sc != StateClass::any) throw PreconditionError("ghz searches all states; --state-class must be 'any'");
      r = ghz_impossibility(cfg, ghz_target);
    } else {
      throw PreconditionError("unknown problem '" + problem + "' (expected chsh, hardy or ghz)");
    }
    const std::string title = problem + " (" + to_string(sc) + ")";
    emit(o, out, o.json ? dump(io::to_json(r)) : optimization_text(title, r));
    return r.converged ? kOk : kNonConvergence;
  });
}

int cmd_rank(const OutputOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto r = rank(build_matrix().as_int_matrix());
    emit(o, out, o.json ? dump({{"rank", r}, {"rows", 12}, {"cols", 16}}) : std::to_string(r) + "\n");
    return kOk;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Behaviors of two-setting, two-outcome Bell experiments: constraints, CHSH, Hardy, optimization"};
  app.require_subcommand(1);

  OutputOptions o;
  double tol = kDefaultTolerance;
  OptimizerOptions opt;
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  auto add_output = [&](CLI::App* sub) {
    sub->add_flag("--json", o.json, "Machine-readable JSON output");
    sub->add_option("--out", o.out_path, "Write output to a file instead of standard output");
  };
  auto add_optimizer = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Optimizer JSON config {restarts, max_iters, tol, seed, ...}")
        ->check(CLI::ExistingFile);
    sub->add_option("--restarts", restarts, "Number of random restarts")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--threads", threads, "Worker threads for restarts")->check(CLI::PositiveNumber);
  };

  std::string path;
  auto* check = app.add_subcommand("check", "Validate a behavior, test locality, run Hardy analysis");
  check->add_option("path", path, "Behavior JSON file ('-' for stdin)")->required();
  check->add_option("--tol", tol, "Tolerance")->check(CLI::PositiveNumber);
  add_output(check);

  bool exhaustive = false;
  auto* solve = app.add_subcommand("solve", "Solve the dependent set from a free-set JSON file");
  solve->add_option("path", path, "Free set JSON file ('-' for stdin)")->required();
  solve->add_option("--tol", tol, "Tolerance")->check(CLI::PositiveNumber);
  solve->add_flag("--exhaustive", exhaustive, "Also check all 255 dependent subset sums");
  add_output(solve);

  std::string parameter;
  double theta_min = 0.0, theta_max = std::numbers::pi / 4.0;
  std::size_t steps = 17;
  bool csv_flag = false;
  auto* scan = app.add_subcommand("scan", "Sweep the Schmidt angle, maximizing the Hardy witness (CSV)");
  scan->add_option("parameter", parameter, "Scanned parameter")->required()->check(CLI::IsMember({"theta"}));
  scan->add_option("--min", theta_min, "Lower end of the range");
  scan->add_option("--max", theta_max, "Upper end of the range");
  scan->add_option("--steps", steps, "Number of grid points (>= 2)");
  scan->add_flag("--csv", csv_flag, "CSV output (always on for scan)");
  scan->add_option("--out", o.out_path, "Write CSV to a file");
  add_optimizer(scan);

  std::string box_name;
  auto* box = app.add_subcommand("box", "Emit a canonical behavior as JSON");
  box->add_option("name", box_name, "pr[:1|2], uniform, det:<a1a2b1b2 signs>, qextremal[:1|2]")->required();
  box->add_option("--out", o.out_path, "Write JSON to a file");

  auto* chsh = app.add_subcommand("chsh", "Correlations and CHSH sum of a behavior");
  chsh->add_option("path", path, "Behavior JSON file ('-' for stdin)")->required();
  add_output(chsh);

  auto* hardy = app.add_subcommand("hardy", "Hardy analysis over all eight sets");
  hardy->add_option("path", path, "Behavior JSON file ('-' for stdin)")->required();
  hardy->add_option("--tol", tol, "Tolerance")->check(CLI::PositiveNumber);
  add_output(hardy);

  std::string problem, state_class = "any";
  double ghz_target = 0.5;
  auto* optimize_cmd = app.add_subcommand("optimize", "Numerical maximization over two-qubit models");
  optimize_cmd->add_option("problem", problem, "chsh, hardy or ghz")
      ->required()
      ->check(CLI::IsMember({"chsh", "hardy", "ghz"}));
  optimize_cmd->add_option("--state-class", state_class, "any, product or maxent")
      ->check(CLI::IsMember({"any", "product", "maxent", "maximally_entangled"}));
  optimize_cmd->add_option("--target", ghz_target, "Common value of the six constrained probabilities (ghz)");
  add_output(optimize_cmd);
  add_optimizer(optimize_cmd);

  auto* rank_cmd = app.add_subcommand("rank", "Exact rank of the 12 x 16 constraint matrix");
  add_output(rank_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (restarts) opt.restarts = restarts;
  if (scan->count("--seed") || optimize_cmd->count("--seed")) opt.seed = seed;
  if (threads) opt.threads = threads;

  if (*check) return cmd_check(path, tol, o, out, err);
  if (*solve) return cmd_solve(path, tol, exhaustive, o, out, err);
  if (*scan) return cmd_scan(theta_min, theta_max, steps, opt, o, out, err);
  if (*box) return cmd_box(box_name, o, out, err);
  if (*chsh) return cmd_chsh(path, o, out, err);
  if (*hardy) return cmd_hardy(path, tol, o, out, err);
  if (*optimize_cmd) return cmd_optimize(problem, state_class, ghz_target, opt, o, out, err);
  if (*rank_cmd) return cmd_rank(o, out, err);
  return kUsage;
}

}  // namespace eprb::cli
