#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "eprb/boxes.hpp"
#include "eprb/detail/simplex.hpp"
#include "eprb/linsys.hpp"
#include "support/oracles.hpp"

using namespace eprb;

TEST(Boxes, PrBoxVariants) {
  EXPECT_EQ(chsh_delta(pr_box(1)), 4.0);
  EXPECT_EQ(chsh_delta(pr_box(2)), -4.0);
  for (int v : {1, 2}) {
    const auto r = validate(pr_box(v));
    EXPECT_TRUE(r.all_pass());
    EXPECT_EQ(r.max_residual(), 0.0);
  }
  EXPECT_THROW(pr_box(3), PreconditionError);
}

TEST(Boxes, DeterministicBoxes) {
  const Behavior all_plus = deterministic_box(DeterministicAssignment::parse("++++"));
  for (int i = 1; i <= 16; ++i) EXPECT_EQ(all_plus.p(i), (i == 1 || i == 5 || i == 9 || i == 13) ? 1.0 : 0.0) << i;
  EXPECT_EQ(chsh_delta(all_plus), 2.0);
  EXPECT_EQ(chsh_delta(deterministic_box(DeterministicAssignment::parse("++--"))), -2.0);

  double max_abs = 0.0;
  const auto all = DeterministicAssignment::all();
  for (const auto& d : all) {
    const Behavior b = deterministic_box(d);
    EXPECT_TRUE(validate(b).all_pass());
    EXPECT_EQ(validate(b).max_residual(), 0.0);
    max_abs = std::max(max_abs, std::abs(chsh_delta(b)));
  }
  EXPECT_EQ(max_abs, 2.0);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = i + 1; j < 16; ++j) EXPECT_NE(all[i].str(), all[j].str());
  EXPECT_THROW(DeterministicAssignment::parse("++x+"), PreconditionError);
  EXPECT_THROW(DeterministicAssignment::parse("+++"), PreconditionError);
}

TEST(Boxes, UniformBox) {
  EXPECT_TRUE(validate(uniform_box()).all_pass());
  EXPECT_EQ(chsh_delta(uniform_box()), 0.0);
}

TEST(Boxes, QuantumExtremal) {
  EXPECT_NEAR(chsh_delta(quantum_extremal_box(1)), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(chsh_delta(quantum_extremal_box(2)), -2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(free_part(quantum_extremal_box(1)).sum(), 2.0 + std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(validate(quantum_extremal_box(2)).all_pass());
}

TEST(Boxes, LocalityOfCanonicalBoxes) {
  for (const auto& d : DeterministicAssignment::all()) EXPECT_TRUE(is_local(deterministic_box(d)).local) << d.str();
  EXPECT_TRUE(is_local(uniform_box()).local);

  const auto pr = is_local(pr_box(1));
  EXPECT_FALSE(pr.local);
  EXPECT_DOUBLE_EQ(pr.witness.value, 4.0);
  EXPECT_EQ(pr.witness.expression(), "+c11+c12+c21-c22");

  const auto pr2 = is_local(pr_box(2));
  EXPECT_FALSE(pr2.local);
  EXPECT_DOUBLE_EQ(pr2.witness.value, 4.0);
  EXPECT_EQ(pr2.witness.expression(), "-c11-c12-c21+c22");

  const auto q = is_local(quantum_extremal_box(1));
  EXPECT_FALSE(q.local);
  EXPECT_NEAR(q.witness.value, 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Boxes, LocalWeightsReproduceBehavior) {
  std::mt19937_64 rng(41);
  const auto dets = DeterministicAssignment::all();
  for (int t = 0; t < 50; ++t) {
    const Behavior b = oracle::random_no_signaling(rng, 0.0);
    const auto res = is_local(b);
    ASSERT_TRUE(res.local);
    Behavior::Values mix{};
    double total = 0.0;
    for (std::size_t d = 0; d < 16; ++d) {
      ASSERT_GE(res.weights[d], -1e-12);
      total += res.weights[d];
      for (std::size_t e = 0; e < 16; ++e) mix[e] += res.weights[d] * deterministic_box(dets[d]).values()[e];
    }
    ASSERT_NEAR(total, 1.0, 1e-9);
    for (std::size_t e = 0; e < 16; ++e) ASSERT_NEAR(mix[e], b.values()[e], 1e-9);
  }
}

TEST(Boxes, LocalityMatchesChshCriterion) {
  // For no-signaling behaviors, membership in the local polytope is
  // equivalent to all eight CHSH expressions being at most 2.
  std::mt19937_64 rng(42);
  int local = 0, nonlocal = 0;
  for (int t = 0; t < 400; ++t) {
    const Behavior b = oracle::random_no_signaling(rng, t % 2 == 0 ? 2.0 : 8.0);
    const double chsh = oracle::max_chsh_oracle(b);
    if (std::abs(chsh - 2.0) < 1e-6) continue;
    const auto res = is_local(b);
    ASSERT_EQ(res.local, chsh < 2.0) << "max CHSH " << chsh << " distance " << res.distance;
    if (!res.local) {
      ASSERT_NEAR(res.witness.value, chsh, 1e-12);
      ++nonlocal;
    } else {
      ++local;
    }
  }
  EXPECT_GT(local, 20);
  EXPECT_GT(nonlocal, 20);
}

TEST(Boxes, IsLocalRequiresValidBehavior) {
  auto v = uniform_box().values();
  v[0] = 0.5;
  EXPECT_THROW(is_local(Behavior(v)), PreconditionError);
}

TEST(BoxesProperty, MixturesOfDeterministicBoxesAreLocal) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200; ++t) {
    const Behavior b = oracle::random_no_signaling(rng, 0.0);
    ASSERT_LE(std::abs(chsh_delta(b)), 2.0 + 1e-12);
    ASSERT_TRUE(is_local(b).local);
  }
}

TEST(Simplex, SmallPrograms) {
  using detail::LpResult;
  // min -x - y  s.t. x + y + s = 1 ; x, y, s >= 0  -> -1
  auto r = detail::solve_lp({{1, 1, 1}}, {1}, {-1, -1, 0});
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
  // x = 2 and x = 3 together are infeasible.
  r = detail::solve_lp({{1}, {1}}, {2, 3}, {0});
  EXPECT_EQ(r.status, LpResult::Status::infeasible);
  // min -x with x - y = 0 is unbounded.
  r = detail::solve_lp({{1, -1}}, {0}, {-1, 0});
  EXPECT_EQ(r.status, LpResult::Status::unbounded);
  // Redundant equality rows are tolerated.
  r = detail::solve_lp({{1, 1}, {2, 2}}, {1, 2}, {1, 2});
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.objective, 1.0, 1e-12);
}
