#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "eprb/behavior.hpp"
#include "eprb/errors.hpp"

namespace eprb {

template <class Real>
struct BasicComplex {
  Real re{};
  Real im{};

  constexpr BasicComplex() = default;
  constexpr BasicComplex(Real r, Real i = Real{}) : re(r), im(i) {}

  friend constexpr BasicComplex operator+(BasicComplex a, BasicComplex b) { return {a.re + b.re, a.im + b.im}; }
  friend constexpr BasicComplex operator-(BasicComplex a, BasicComplex b) { return {a.re - b.re, a.im - b.im}; }
  friend constexpr BasicComplex operator*(BasicComplex a, BasicComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend constexpr BasicComplex operator*(Real s, BasicComplex a) { return {s * a.re, s * a.im}; }
  BasicComplex& operator+=(BasicComplex b) {
    re += b.re;
    im += b.im;
    return *this;
  }

  constexpr BasicComplex conj() const { return {re, -im}; }
  constexpr Real norm2() const { return re * re + im * im; }
};

template <class Real>
using Vec3 = std::array<Real, 3>;

template <class Real>
Real euclidean_norm(const Vec3<Real>& v) {
  using std::sqrt;
  return sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

/// Rank-one projector onto the m = +/-1 eigenvector of n . sigma, i.e.
/// (I + m n . sigma) / 2 for a unit Bloch vector n.
template <class Real>
struct BasicProjector {
  using Complex = BasicComplex<Real>;
  std::array<std::array<Complex, 2>, 2> m{};

  static BasicProjector along(const Vec3<Real>& n, Outcome outcome) {
    const Real s = outcome == Outcome::plus ? Real{1} : Real{-1};
    const Real h = Real{1} / Real{2};
    BasicProjector p;
    p.m[0][0] = {h * (1 + s * n[2]), 0};
    p.m[0][1] = {h * s * n[0], -h * s * n[1]};
    p.m[1][0] = {h * s * n[0], h * s * n[1]};
    p.m[1][1] = {h * (1 - s * n[2]), 0};
    return p;
  }

  static BasicProjector identity() {
    BasicProjector p;
    p.m[0][0] = {1, 0};
    p.m[1][1] = {1, 0};
    return p;
  }

  BasicProjector operator*(const BasicProjector& o) const {
    BasicProjector r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
    return r;
  }

  BasicProjector operator+(const BasicProjector& o) const {
    BasicProjector r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }

  Complex trace() const { return m[0][0] + m[1][1]; }

  // Largest entrywise modulus of (this - o).
  Real distance(const BasicProjector& o) const {
    using std::sqrt;
    Real d{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const Real x = sqrt((m[i][j] - o.m[i][j]).norm2());
        if (x > d) d = x;
      }
    return d;
  }

  bool is_hermitian(Real tol) const {
    using std::sqrt;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (sqrt((m[i][j] - m[j][i].conj()).norm2()) > tol) return false;
    return true;
  }

  bool is_idempotent(Real tol) const { return ((*this) * (*this)).distance(*this) <= tol; }
};

/// Two-qubit pure state with two measurement directions per side.
///
/// Amplitudes are over |00>, |01>, |10>, |11> with qubit A first and |0> the
/// +1 eigenvector of sigma_z. Each measurement is the observable n . sigma
/// for a unit Bloch vector n. Both parties act on different tensor factors,
/// so their projectors commute by construction.
template <class Real>
class BasicQuantumModel {
 public:
  using Complex = BasicComplex<Real>;
  using State = std::array<Complex, 4>;
  using Projector = BasicProjector<Real>;

  struct Settings {
    Vec3<Real> a1{0, 0, 1};
    Vec3<Real> a2{0, 0, 1};
    Vec3<Real> b1{0, 0, 1};
    Vec3<Real> b2{0, 0, 1};
  };

  static constexpr double kNormTolerance = 1e-12;

  BasicQuantumModel(const State& state, const Settings& settings) : state_(state), settings_(settings) {
    using std::abs;
    Real n2{};
    for (const auto& c : state_) n2 += c.norm2();
    if (!(abs(n2 - Real{1}) <= Real(kNormTolerance)))
      throw PreconditionError("state is not normalized (|psi|^2 = " + std::to_string(static_cast<double>(n2)) + ")");
    for (const auto* d : {&settings_.a1, &settings_.a2, &settings_.b1, &settings_.b2})
      if (!(abs(euclidean_norm(*d) - Real{1}) <= Real(kNormTolerance)))
        throw PreconditionError("measurement direction is not a unit vector");
  }

  const State& state() const { return state_; }
  const Settings& settings() const { return settings_; }

  const Vec3<Real>& direction(Side side, int setting) const {
    require_setting(setting);
    if (side == Side::a) return setting == 1 ? settings_.a1 : settings_.a2;
    return setting == 1 ? settings_.b1 : settings_.b2;
  }

  Projector projector(Side side, int setting, Outcome outcome) const {
    return Projector::along(direction(side, setting), outcome);
  }

  // <psi| (pa (x) pb) |psi>, returned as (re, im).
  Complex expectation(const Projector& pa, const Projector& pb) const {
    Complex acc{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Complex phi{};
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) phi += pa.m[i][k] * pb.m[j][l] * state_[static_cast<std::size_t>(2 * k + l)];
        acc += state_[static_cast<std::size_t>(2 * i + j)].conj() * phi;
      }
    return acc;
  }

 private:
  State state_;
  Settings settings_;
};

using Complex = BasicComplex<double>;
using Projector = BasicProjector<double>;
using QuantumModel = BasicQuantumModel<double>;

inline constexpr double kBornImaginaryTolerance = 1e-12;

/// Born-rule probability p(a_j = m, b_k = n).
template <class Real>
Real joint_probability(const BasicQuantumModel<Real>& model, int j, int k, Outcome m, Outcome n) {
  using std::abs;
  const auto e = model.expectation(model.projector(Side::a, j, m), model.projector(Side::b, k, n));
  if (!(abs(e.im) <= Real(kBornImaginaryTolerance)))
    throw ConsistencyError("Born-rule expectation has imaginary part " + std::to_string(static_cast<double>(e.im)));
  return e.re;
}

/// One-side marginal <psi| P (x) I |psi> (side A) or <psi| I (x) P |psi>.
template <class Real>
Real marginal_from_model(const BasicQuantumModel<Real>& model, Side side, int setting, Outcome outcome) {
  using std::abs;
  using P = BasicProjector<Real>;
  const P proj = model.projector(side, setting, outcome);
  const auto e = side == Side::a ? model.expectation(proj, P::identity()) : model.expectation(P::identity(), proj);
  if (!(abs(e.im) <= Real(kBornImaginaryTolerance)))
    throw ConsistencyError("Born-rule marginal has imaginary part " + std::to_string(static_cast<double>(e.im)));
  return e.re;
}

/// All 16 joint probabilities of the model, in the canonical Behavior order.
template <class Real>
Behavior behavior_from_model(const BasicQuantumModel<Real>& model) {
  Behavior::Values p{};
  for (int j = 1; j <= 2; ++j)
    for (int k = 1; k <= 2; ++k)
      for (Outcome m : kOutcomes)
        for (Outcome n : kOutcomes)
          p[Behavior::index(j, k, m, n)] = static_cast<double>(joint_probability(model, j, k, m, n));
  return Behavior(p);
}

/// Eigenvector of n . sigma with eigenvalue `outcome` (n a unit vector),
/// up to a global phase.
template <class Real>
std::array<BasicComplex<Real>, 2> eigenvector(const Vec3<Real>& n, Outcome outcome) {
  using std::acos;
  using std::atan2;
  using std::cos;
  using std::sin;
  const Real s = outcome == Outcome::plus ? Real{1} : Real{-1};
  const Real z = std::clamp(s * n[2], Real{-1}, Real{1});
  const Real theta = acos(z);
  const Real phi = atan2(s * n[1], s * n[0]);
  return {BasicComplex<Real>(cos(theta / 2)), BasicComplex<Real>(cos(phi) * sin(theta / 2), sin(phi) * sin(theta / 2))};
}

/// Probability amplitude (<m; a_j| (x) <n; b_k|) |psi>. Its squared modulus
/// equals joint_probability, but it is computed without cancellation, so it
/// stays accurate when the probability is near zero.
template <class Real>
BasicComplex<Real> projection_amplitude(const BasicQuantumModel<Real>& model, int j, int k, Outcome m, Outcome n) {
  const auto u = eigenvector(model.direction(Side::a, j), m);
  const auto v = eigenvector(model.direction(Side::b, k), n);
  BasicComplex<Real> acc{};
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) acc += u[x].conj() * v[y].conj() * model.state()[2 * x + y];
  return acc;
}

// cos(theta) |00> + sin(theta) |11>
template <class Real = double>
typename BasicQuantumModel<Real>::State schmidt_state(Real theta) {
  using std::cos;
  using std::sin;
  return {BasicComplex<Real>(cos(theta)), BasicComplex<Real>(), BasicComplex<Real>(), BasicComplex<Real>(sin(theta))};
}

// (|01> - |10>) / sqrt(2)
inline QuantumModel::State singlet_state() {
  const double r = 1.0 / std::sqrt(2.0);
  return {Complex(0), Complex(r), Complex(-r), Complex(0)};
}

// Unit Bloch vector in the x-z plane at angle phi from +z.
template <class Real = double>
Vec3<Real> planar_direction(Real phi) {
  using std::cos;
  using std::sin;
  return {sin(phi), Real{}, cos(phi)};
}

// Unit Bloch vector from polar angle theta and azimuth phi.
inline Vec3<double> bloch_direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Spinor whose Bloch vector is n (n must be a unit vector).
inline std::array<Complex, 2> spinor(const Vec3<double>& n) {
  const double theta = std::acos(std::clamp(n[2], -1.0, 1.0));
  const double phi = std::atan2(n[1], n[0]);
  return {Complex(std::cos(theta / 2)), Complex(std::cos(phi) * std::sin(theta / 2), std::sin(phi) * std::sin(theta / 2))};
}

// |n_a> (x) |n_b>
inline QuantumModel::State product_state(const Vec3<double>& na, const Vec3<double>& nb) {
  const auto a = spinor(na);
  const auto b = spinor(nb);
  return {a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
}

}  // namespace eprb
