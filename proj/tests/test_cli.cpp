#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "eprb/io.hpp"
#include "support/oracles.hpp"

using namespace eprb;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run eprb_run(std::vector<std::string> args) {
  args.insert(args.begin(), "eprb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() / ("eprb-test-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string sample(const std::string& name) { return std::string(EPRB_SAMPLES_DIR) + "/" + name; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Io, BehaviorLayout) {
  const json j = io::to_json(pr_box(1));
  ASSERT_EQ(j["blocks"].size(), 4u);
  EXPECT_EQ(j["blocks"][0]["pp"], 0.5);
  EXPECT_EQ(j["blocks"][3]["pm"], 0.5);
  EXPECT_EQ(j["flat"]["p14"], 0.5);
  EXPECT_EQ(j["flat"]["p13"], 0.0);
}

TEST(Io, FlatFormAccepted) {
  json flat = json::object();
  for (int i = 1; i <= 16; ++i) flat["p" + std::to_string(i)] = 0.25;
  EXPECT_EQ(io::behavior_from_json(flat), uniform_box());
  flat.erase("p7");
  EXPECT_THROW(io::behavior_from_json(flat), StructuralError);
  json blocks = io::to_json(uniform_box());
  blocks["blocks"][2].erase("mp");
  EXPECT_THROW(io::behavior_from_json(blocks), StructuralError);
  EXPECT_THROW(io::behavior_from_json(json::array()), StructuralError);
}

TEST(Io, QuantumModelRoundTrip) {
  std::mt19937_64 rng(61);
  const QuantumModel m = oracle::random_model(rng);
  const QuantumModel back = io::quantum_model_from_json(json::parse(io::to_json(m).dump()));
  EXPECT_EQ(behavior_from_model(m), behavior_from_model(back));
  json bad = io::to_json(m);
  bad["settings"].erase("b2");
  EXPECT_THROW(io::quantum_model_from_json(bad), StructuralError);
}

TEST(Io, ConfigOverrides) {
  const auto cfg = io::config_from_json(json::parse(R"({"restarts": 4, "seed": 9, "tol": 1e-12})"));
  EXPECT_EQ(cfg.restarts, 4u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.tol, 1e-12);
  EXPECT_EQ(cfg.penalty_cap, OptimizationConfig{}.penalty_cap);
  EXPECT_THROW(io::config_from_json(json::parse(R"({"restart": 4})")), StructuralError);
  EXPECT_THROW(io::config_from_json(json::parse(R"({"restarts": 0})")), PreconditionError);
  const OptimizationConfig same = io::config_from_json(io::to_json(cfg));
  EXPECT_EQ(same.restarts, cfg.restarts);
  EXPECT_EQ(same.tol, cfg.tol);
}

TEST(IoProperty, BehaviorRoundTripIsExact) {
  std::mt19937_64 rng(62);
  for (int t = 0; t < 500; ++t) {
    const Behavior b = t % 2 ? oracle::random_normalized(rng) : behavior_from_model(oracle::random_model(rng));
    const Behavior back = io::behavior_from_json(json::parse(io::to_json(b).dump()));
    ASSERT_EQ(b, back);
    const Behavior from_flat = io::behavior_from_json(json::parse(io::to_json(b)["flat"].dump()));
    ASSERT_EQ(b, from_flat);
  }
}

TEST(Cli, CheckPrBox) {
  const auto r = eprb_run({"check", sample("pr.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("non-local"), std::string::npos);
  EXPECT_NE(r.out.find("+c11+c12+c21-c22 = 4"), std::string::npos);
  EXPECT_NE(r.out.find("all pass"), std::string::npos);
}

TEST(Cli, CheckUniformJson) {
  const auto r = eprb_run({"check", sample("uniform.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["validation"]["all_pass"]);
  EXPECT_TRUE(j["locality"]["local"]);
  EXPECT_EQ(j["hardy"].size(), 8u);
  EXPECT_EQ(j["delta"], 0.0);
}

TEST(Cli, CheckSignalingBoxFails) {
  TempDir d;
  json j = io::to_json(Behavior::from_blocks(
      {{{1, 0, 0, 0}, {0, 1, 0, 0}, {0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}}}));
  const auto r = eprb_run({"check", d.write("sig.json", j.dump()), "--json"});
  EXPECT_EQ(r.code, 2);
  const json out = json::parse(r.out);
  EXPECT_FALSE(out["validation"]["all_pass"]);
  EXPECT_FALSE(out.contains("locality"));
}

TEST(Cli, MalformedInputIsUsageError) {
  TempDir d;
  EXPECT_EQ(eprb_run({"check", d.write("trunc.json", R"({"blocks": [{"pp": 0.5, "pm")")}).code, 1);
  EXPECT_EQ(eprb_run({"check", d.write("missing.json", R"({"p1": 1})")}).code, 1);
  EXPECT_EQ(eprb_run({"check", d.file("absent.json")}).code, 1);
  EXPECT_EQ(eprb_run({"frobnicate"}).code, 1);
  EXPECT_EQ(eprb_run({}).code, 1);
  EXPECT_EQ(eprb_run({"box", "pr:3"}).code, 1);
}

TEST(Cli, SolveHalfPoint) {
  TempDir d;
  const auto r = eprb_run({"solve", d.write("u.json", io::to_json(FreeSet::filled(0.5)).dump()), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  for (int p : DependentSet::indices()) EXPECT_EQ(j["dependent"]["p" + std::to_string(p)], 0.0);
  EXPECT_TRUE(j["feasibility"]["all_pass"]);
}

TEST(Cli, SolveHardyOptimum) {
  const auto r = eprb_run({"solve", sample("hardy_free_set.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out)["dependent"]["p13"].get<double>(), 0.0901699, 1e-7);
}

TEST(Cli, SolveInfeasible) {
  TempDir d;
  FreeSet u;
  u.set(1, 1.0);
  u.set(8, 1.0);
  const auto r = eprb_run({"solve", d.write("u.json", io::to_json(u).dump())});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("INFEASIBLE"), std::string::npos);
  u.set(8, 1.5);
  EXPECT_EQ(eprb_run({"solve", d.write("v.json", io::to_json(u).dump())}).code, 2);
}

TEST(Cli, Rank) {
  const auto r = eprb_run({"rank"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "8\n");
}

TEST(Cli, BoxOutputReparses) {
  for (const char* name : {"pr", "pr:2", "uniform", "det:+-+-", "qextremal", "qextremal:2"}) {
    const auto r = eprb_run({"box", name});
    ASSERT_EQ(r.code, 0) << name << r.err;
    EXPECT_TRUE(validate(io::behavior_from_json(json::parse(r.out))).all_pass()) << name;
  }
  EXPECT_EQ(io::behavior_from_json(json::parse(eprb_run({"box", "qextremal"}).out)), quantum_extremal_box(1));
}

TEST(Cli, BoxToFileThenCheck) {
  TempDir d;
  const std::string f = d.file("pr.json");
  ASSERT_EQ(eprb_run({"box", "pr", "--out", f}).code, 0);
  EXPECT_EQ(eprb_run({"check", f}).code, 0);
}

TEST(Cli, ChshJson) {
  const auto r = eprb_run({"chsh", sample("pr.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["delta"], 4.0);
  EXPECT_EQ(j["correlations"]["c22"], -1.0);
}

TEST(Cli, HardyOnOptimum) {
  TempDir d;
  FreeSet u = io::free_set_from_json(json::parse(std::ifstream(sample("hardy_free_set.json"))));
  const auto path = d.write("b.json", io::to_json(assemble(u, solve_dependent(u))).dump());
  const auto r = eprb_run({"hardy", path, "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j.size(), 8u);
  EXPECT_EQ(j[6]["set"]["witness"], "p13");
  EXPECT_TRUE(j[6]["premises_satisfied"]);
  EXPECT_EQ(j[6]["classification"], "quantum-consistent");
  EXPECT_NEAR(j[6]["sigma"].get<double>(), 0.8196601, 1e-7);
}

TEST(Cli, ScanRowsSatisfyIdentities) {
  const auto r = eprb_run({"scan", "theta", "--steps", "4", "--restarts", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"theta", "p13", "delta", "sigma", "status"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double p13 = std::stod(rows[i][1]), delta = std::stod(rows[i][2]), sigma = std::stod(rows[i][3]);
    EXPECT_NEAR(delta, 2 + 4 * p13, 1e-6) << i;
    EXPECT_NEAR(sigma, 1 - 2 * p13, 1e-6) << i;
    EXPECT_EQ(rows[i][4], "ok");
    EXPECT_LE(p13, GoldenMean::hardy_quantum_max() + 1e-6);
  }
  EXPECT_EQ(std::stod(rows[1][0]), 0.0);
  EXPECT_LT(std::stod(rows[1][1]), 1e-6);  // product state
  EXPECT_NEAR(std::stod(rows[4][0]), std::numbers::pi / 4, 1e-15);
  EXPECT_LT(std::stod(rows[4][1]), 1e-6);  // maximally entangled
}

TEST(Cli, ScanNearOptimalAngle) {
  const auto r = eprb_run({"scan", "theta", "--min", "0.4346", "--max", "0.4348", "--steps", "3", "--restarts", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  double best = 0.0;
  const auto rows = csv_rows(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) best = std::max(best, std::stod(rows[i][1]));
  EXPECT_NEAR(best, GoldenMean::hardy_quantum_max(), 1e-4);
}

TEST(Cli, ScanRejectsBadRange) {
  EXPECT_EQ(eprb_run({"scan", "theta", "--max", "1.0"}).code, 1);
  EXPECT_EQ(eprb_run({"scan", "theta", "--steps", "1"}).code, 1);
}

TEST(Cli, OptimizeChshWithConfig) {
  const auto r = eprb_run({"optimize", "chsh", "--config", sample("optimizer.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["objective"].get<double>(), 2.0 * std::sqrt(2.0), 1e-6);
  EXPECT_EQ(j["stats"]["restarts"], 8);
  EXPECT_TRUE(validate(io::behavior_from_json(j["behavior"]), 1e-12).all_pass());
  const Behavior from_model = behavior_from_model(io::quantum_model_from_json(j["model"]));
  const Behavior reported = io::behavior_from_json(j["behavior"]);
  for (int i = 1; i <= 16; ++i) EXPECT_NEAR(from_model.p(i), reported.p(i), 1e-12) << i;
}

TEST(Cli, OptimizeHardyProductAndGhzArguments) {
  auto r = eprb_run({"optimize", "hardy", "--state-class", "product", "--restarts", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
  r = eprb_run({"optimize", "ghz", "--state-class", "product"});
  EXPECT_EQ(r.code, 1);
  r = eprb_run({"optimize", "bogus"});
  EXPECT_EQ(r.code, 1);
}
