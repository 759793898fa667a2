#pragma once

// Test-only reference computations, kept independent of the library code
// paths they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "eprb/behavior.hpp"
#include "eprb/boxes.hpp"
#include "eprb/linsys.hpp"
#include "eprb/quantum.hpp"

namespace eprb::oracle {

using cplx = std::complex<double>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;

inline double uniform01(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline FreeSet random_free_set(std::mt19937_64& rng) {
  FreeSet::Values v;
  for (double& x : v) x = uniform01(rng);
  return FreeSet(v);
}

inline Vec3<double> random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3<double> v{g(rng), g(rng), g(rng)};
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

inline QuantumModel::State random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  QuantumModel::State s;
  double n2 = 0.0;
  for (auto& a : s) {
    a = Complex(g(rng), g(rng));
    n2 += a.norm2();
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& a : s) a = Complex(a.re * inv, a.im * inv);
  return s;
}

inline QuantumModel::Settings random_settings(std::mt19937_64& rng) {
  return {random_direction(rng), random_direction(rng), random_direction(rng), random_direction(rng)};
}

inline QuantumModel random_model(std::mt19937_64& rng) { return QuantumModel(random_state(rng), random_settings(rng)); }

// (I + s n.sigma) / 2 built from the Pauli matrices.
inline Mat2 pauli_projector(const Vec3<double>& n, int s) {
  const cplx i(0.0, 1.0);
  Mat2 m{};
  const Mat2 sx{{{0.0, 1.0}, {1.0, 0.0}}};
  const Mat2 sy{{{0.0, -i}, {i, 0.0}}};
  const Mat2 sz{{{1.0, 0.0}, {0.0, -1.0}}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      m[r][c] = 0.5 * ((r == c ? 1.0 : 0.0) + double(s) * (n[0] * sx[r][c] + n[1] * sy[r][c] + n[2] * sz[r][c]));
  return m;
}

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 m{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
  return m;
}

// <psi| (P_a (x) P_b) |psi> through an explicit 4 x 4 Kronecker product.
inline cplx born_oracle(const QuantumModel& model, int j, int k, int m, int n) {
  const Mat4 op = kron(pauli_projector(model.direction(Side::a, j), m), pauli_projector(model.direction(Side::b, k), n));
  std::array<cplx, 4> psi;
  for (std::size_t i = 0; i < 4; ++i) psi[i] = cplx(model.state()[i].re, model.state()[i].im);
  cplx acc = 0.0;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) acc += std::conj(psi[r]) * op[r][c] * psi[c];
  return acc;
}

// Largest of the eight CHSH expressions, written out term by term.
inline double max_chsh_oracle(const Behavior& b) {
  auto c = [&](int j, int k) {
    const auto blk = b.block(j, k);
    return blk[0] - blk[1] - blk[2] + blk[3];
  };
  const double c11 = c(1, 1), c12 = c(1, 2), c21 = c(2, 1), c22 = c(2, 2);
  return std::max({std::abs(c11 + c12 + c21 - c22), std::abs(c11 + c12 - c21 + c22), std::abs(c11 - c12 + c21 + c22),
                   std::abs(-c11 + c12 + c21 + c22)});
}

// Random mixture of the deterministic boxes and one PR box (either variant):
// no-signaling, local exactly when the PR weight is small enough.
inline Behavior random_no_signaling(std::mt19937_64& rng, double pr_weight_scale) {
  std::array<double, 17> w;
  double total = 0.0;
  for (std::size_t i = 0; i < 17; ++i) {
    w[i] = uniform01(rng) * (i == 16 ? pr_weight_scale : 1.0);
    total += w[i];
  }
  const Behavior pr = pr_box(uniform01(rng) < 0.5 ? 1 : 2);
  Behavior::Values p{};
  const auto dets = DeterministicAssignment::all();
  for (std::size_t i = 0; i < 17; ++i) {
    const Behavior& box = i < 16 ? deterministic_box(dets[i]) : pr;
    for (std::size_t e = 0; e < 16; ++e) p[e] += w[i] / total * box.values()[e];
  }
  return Behavior(p);
}

// Blocks each normalized, but with no relation between blocks.
inline Behavior random_normalized(std::mt19937_64& rng) {
  std::array<Behavior::Block, 4> blocks{};
  for (auto& blk : blocks) {
    double s = 0.0;
    for (double& x : blk) s += (x = uniform01(rng));
    for (double& x : blk) x /= s;
  }
  return Behavior::from_blocks(blocks);
}

}  // namespace eprb::oracle
