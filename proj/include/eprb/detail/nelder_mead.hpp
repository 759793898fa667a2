#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace eprb::detail {

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  std::size_t max_iters = 4000;
  double ftol = 1e-13;   // spread of simplex values, relative to 1 + |f|
  double xtol = 1e-10;   // simplex diameter (max-norm)
  double initial_step = 0.3;
};

// Standard simplex reflection search (reflect 1, expand 2, contract 1/2,
// shrink 1/2) minimizing f. Stops when both the value spread and the
// simplex diameter fall below their tolerances.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  NelderMeadResult out;
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);
  out.evaluations = n + 1;

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto along = [&](std::vector<double>& dst, const std::vector<double>& from, double t) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = centroid[i] + t * (from[i] - centroid[i]);
  };

  for (; out.iterations < opt.max_iters; ++out.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t v = 0; v <= n; ++v)
      for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(pts[v][i] - pts[best][i]));
    if (std::abs(fv[worst] - fv[best]) <= opt.ftol * (1.0 + std::abs(fv[best])) && diameter <= opt.xtol) {
      out.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= n; ++v)
      if (v != worst)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += pts[v][i] / static_cast<double>(n);

    along(trial, pts[worst], -1.0);
    const double fr = f(trial);
    ++out.evaluations;
    if (fr < fv[best]) {
      along(trial2, pts[worst], -2.0);
      const double fe = f(trial2);
      ++out.evaluations;
      if (fe < fr) {
        pts[worst] = trial2;
        fv[worst] = fe;
      } else {
        pts[worst] = trial;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = trial;
      fv[worst] = fr;
      continue;
    }
    // Contraction: outside if the reflected point beat the worst, else inside.
    const bool outside = fr < fv[worst];
    along(trial2, outside ? trial : pts[worst], 0.5);
    const double fc = f(trial2);
    ++out.evaluations;
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = trial2;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t v = 0; v <= n; ++v) {
      if (v == best) continue;
      for (std::size_t i = 0; i < n; ++i) pts[v][i] = pts[best][i] + 0.5 * (pts[v][i] - pts[best][i]);
      fv[v] = f(pts[v]);
      ++out.evaluations;
    }
  }

  const auto it = std::min_element(fv.begin(), fv.end());
  out.f = *it;
  out.x = pts[static_cast<std::size_t>(it - fv.begin())];
  return out;
}

}  // namespace eprb::detail
