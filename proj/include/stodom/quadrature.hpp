#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "stodom/common.hpp"

namespace stodom {

// Gauss–Legendre nodes and weights on [a, b], Newton-refined from the
// Chebyshev initial guess.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int m, double a, double b) {
  if (m < 1) throw param_error("gauss_legendre: need at least one node");
  std::vector<double> x(static_cast<std::size_t>(m));
  std::vector<double> w(static_cast<std::size_t>(m));
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int half_count = (m + 1) / 2;
  for (int i = 0; i < half_count; ++i) {
    double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - static_cast<double>(j) * p2) / (static_cast<double>(j) + 1.0);
      }
      pp = static_cast<double>(m) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = mid - half * z;
    x[static_cast<std::size_t>(m - 1 - i)] = mid + half * z;
    const double weight = 2.0 * half / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = weight;
    w[static_cast<std::size_t>(m - 1 - i)] = weight;
  }
  return {std::move(x), std::move(w)};
}

// Product-rule integral of f over [a,b]^2 with m nodes per axis.
template <typename F>
inline double integrate2d(F&& f, int m, double a, double b) {
  auto [x, w] = gauss_legendre(m, a, b);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j)
      row += w[static_cast<std::size_t>(j)] * f(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
    total += w[static_cast<std::size_t>(i)] * row;
  }
  return total;
}

struct QuadratureSpec {
  int nodes = 64;             // per axis, >= 16
  double target_error = 1e-8; // node-doubling tolerance
  int max_nodes = 4096;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int nodes_used = 0;
};

// Node-doubling driver: integrates at m and 2m nodes until the difference
// meets the target.
template <typename F>
inline QuadratureResult integrate2d_adaptive(F&& f, const QuadratureSpec& spec, double a, double b) {
  if (spec.nodes < 16) throw param_error("QuadratureSpec: nodes must be >= 16");
  int m = spec.nodes;
  double coarse = integrate2d(f, m, a, b);
  while (true) {
    const double fine = integrate2d(f, 2 * m, a, b);
    const double err = std::abs(fine - coarse);
    if (err <= spec.target_error) return {fine, err, 2 * m};
    if (2 * m >= spec.max_nodes)
      throw numerical_error("integrate2d_adaptive: " + std::to_string(m) + " vs " +
                            std::to_string(2 * m) + " nodes differ by " + std::to_string(err));
    coarse = fine;
    m *= 2;
  }
}

}  // namespace stodom
