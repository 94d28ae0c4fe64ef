#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stodom/common.hpp"
#include "stodom/measure.hpp"

namespace stodom {

// Exchangeable law on {0,1}^n summarised by u_i = probability of any fixed
// configuration with i ones and n-i zeros.
struct UVector {
  int n = 0;
  std::vector<double> u;  // size n+1

  UVector() = default;
  UVector(int n_sites, std::vector<double> values) : n(n_sites), u(std::move(values)) { validate(); }

  void validate() const {
    if (n < 1) throw param_error("UVector: n must be >= 1");
    if (u.size() != static_cast<std::size_t>(n) + 1)
      throw param_error("UVector: needs n+1 entries");
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      if (u[static_cast<std::size_t>(i)] < 0.0) throw param_error("UVector: negative entry");
      s += binomial_coefficient(n, i) * u[static_cast<std::size_t>(i)];
    }
    if (std::abs(s - 1.0) > kWeightTol)
      throw param_error("UVector: binomial-weighted entries must sum to 1 within 1e-12");
  }
};

// Mixing law of a de Finetti mixture: finitely many atoms (w, probability).
struct MixingLaw {
  std::vector<std::pair<double, double>> atoms;

  void validate() const {
    double s = 0.0;
    for (const auto& [w, p] : atoms) {
      if (!(w >= 0.0 && w <= 1.0)) throw param_error("MixingLaw: atom outside [0,1]");
      if (p < 0.0) throw param_error("MixingLaw: negative probability");
      s += p;
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
      for (std::size_t j = i + 1; j < atoms.size(); ++j)
        if (atoms[i].first == atoms[j].first) throw param_error("MixingLaw: duplicate atom");
    if (std::abs(s - 1.0) > kWeightTol)
      throw param_error("MixingLaw: probabilities must sum to 1 within 1e-12");
  }
};

// Log-convexity of the u-vector: u_i^2 <= u_{i-1} u_{i+1} for all interior i.
// An interior zero between positive neighbours passes the inequality but is
// reported through the optional warning flag, since it indicates a degenerate
// law outside the intended use.
inline bool exch_fkg_check(const UVector& uv, bool* interior_zero_warning = nullptr) {
  if (interior_zero_warning) *interior_zero_warning = false;
  for (int i = 1; i < uv.n; ++i) {
    const double ui = uv.u[static_cast<std::size_t>(i)];
    const double lo = uv.u[static_cast<std::size_t>(i - 1)];
    const double hi = uv.u[static_cast<std::size_t>(i + 1)];
    if (ui * ui > lo * hi + kWeightTol) return false;
    if (interior_zero_warning && ui == 0.0 && lo > 0.0 && hi > 0.0) *interior_zero_warning = true;
  }
  return true;
}

// All-zero criterion for FKG exchangeable laws: dominates the density-rho
// product measure iff u_0 <= (1-rho)^n.
inline bool exch_dominates(const UVector& uv, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw param_error("exch_dominates: rho must be in [0,1]");
  if (!exch_fkg_check(uv))
    throw hypothesis_error("exch_dominates: u-vector fails the FKG condition; use count_tail_dominance");
  return uv.u[0] <= pow_int(1.0 - rho, uv.n) + kWeightTol;
}

// Count-tail criterion, exact for any exchangeable law against a product law:
// P(at least k ones) must weakly exceed the binomial tail for every k.
inline bool count_tail_dominance(const UVector& uv, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw param_error("count_tail_dominance: rho must be in [0,1]");
  double tail_u = 0.0;
  double tail_b = 0.0;
  for (int k = uv.n; k >= 0; --k) {
    const double c = binomial_coefficient(uv.n, k);
    tail_u += c * uv.u[static_cast<std::size_t>(k)];
    tail_b += c * pow_int(rho, k) * pow_int(1.0 - rho, uv.n - k);
    if (tail_u + kWeightTol < tail_b) return false;
  }
  return true;
}

inline UVector definetti_uvector(const MixingLaw& law, int n) {
  law.validate();
  if (n < 1) throw param_error("definetti_uvector: n must be >= 1");
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  for (const auto& [w, p] : law.atoms)
    for (int i = 0; i <= n; ++i)
      u[static_cast<std::size_t>(i)] += p * pow_int(w, i) * pow_int(1.0 - w, n - i);
  return UVector(n, std::move(u));
}

// Largest dominated product density for an FKG exchangeable law: 1 - u_0^{1/n}.
inline double max_density(const UVector& uv) {
  if (!exch_fkg_check(uv)) throw hypothesis_error("max_density: u-vector fails the FKG condition");
  return 1.0 - std::pow(uv.u[0], 1.0 / uv.n);
}

// Mixture form: 1 - (E (1-W)^n)^{1/n}, agreeing with max_density on the
// corresponding u-vector.
inline double max_density_mixture(const MixingLaw& law, int n) {
  law.validate();
  if (n < 1) throw param_error("max_density_mixture: n must be >= 1");
  double m = 0.0;
  for (const auto& [w, p] : law.atoms) m += p * pow_int(1.0 - w, n);
  return 1.0 - std::pow(m, 1.0 / n);
}

// Probability that a fixed pattern with a ones and b zeros occupies the first
// a+b coordinates.
inline double pattern_probability(const UVector& uv, int ones, int zeros) {
  const int rest = uv.n - ones - zeros;
  if (ones < 0 || zeros < 0 || rest < 0) throw param_error("pattern_probability: invalid counts");
  double q = 0.0;
  for (int j = 0; j <= rest; ++j)
    q += binomial_coefficient(rest, j) * uv.u[static_cast<std::size_t>(ones + j)];
  return q;
}

// Infimum over positive-probability histories shorter than n of the
// conditional probability of the next coordinate being a 1. This is the
// one-sided conditional bound that sequential coupling would need; for FKG
// exchangeable laws it may sit strictly below the max_density threshold.
inline double conditional_analogue(const UVector& uv) {
  if (uv.n < 2) throw param_error("conditional_analogue: n must be >= 2");
  double inf = 1.0;
  bool any = false;
  for (int len = 0; len < uv.n; ++len) {
    for (int a = 0; a <= len; ++a) {
      const int b = len - a;
      const double q = pattern_probability(uv, a, b);
      if (q <= 0.0) continue;  // undefined conditional, skipped
      const double next1 = pattern_probability(uv, a + 1, b) / q;
      if (next1 < inf) inf = next1;
      any = true;
    }
  }
  if (!any) throw numerical_error("conditional_analogue: no positive-probability history");
  return inf;
}

// Weight u_i on each of the C(n,i) configurations with i ones; bridges the
// u-vector to the exact finite-lattice oracles.
inline FiniteMeasure expand_uvector(const UVector& uv) {
  std::vector<double> w(std::size_t{1} << uv.n);
  for (std::uint32_t m = 0; m < w.size(); ++m) w[m] = uv.u[static_cast<std::size_t>(popcount32(m))];
  return FiniteMeasure(uv.n, std::move(w));
}

namespace detail {

// Phase-1 simplex: minimise the total slack of A q = b over q >= 0.
// Rows are few (n+1 moment constraints); columns are the grid atoms plus a
// signed slack pair per row. Returns the optimal residual mass.
inline double equality_feasibility_residual(const std::vector<std::vector<double>>& a,
                                            const std::vector<double>& b) {
  const std::size_t rows = b.size();
  const std::size_t nq = a.empty() ? 0 : a[0].size();
  const std::size_t cols = nq + 2 * rows;  // q, s+, s-
  // tableau[r][c], last column is the rhs; objective carried separately.
  std::vector<std::vector<double>> t(rows, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < nq; ++c) t[r][c] = a[r][c];
    t[r][nq + r] = 1.0;          // s+ (initial basis; b >= 0 entrywise)
    t[r][nq + rows + r] = -1.0;  // s-
    t[r][cols] = b[r];
    basis[r] = nq + r;
  }
  auto cost = [&](std::size_t c) { return c >= nq ? 1.0 : 0.0; };

  const int max_iter = 20000;
  for (int iter = 0; iter < max_iter; ++iter) {
    // reduced costs: c_j - sum_r cost(basis_r) * t[r][j]
    const bool bland = iter > 5000;  // anti-cycling fallback
    std::size_t enter = cols;
    double best = -1e-12;
    for (std::size_t c = 0; c < cols; ++c) {
      double rc = cost(c);
      for (std::size_t r = 0; r < rows; ++r)
        if (cost(basis[r]) != 0.0) rc -= t[r][c];
      if (rc < best) {
        best = rc;
        enter = c;
        if (bland) break;
      }
    }
    if (enter == cols) break;  // optimal
    std::size_t leave = rows;
    double ratio = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (t[r][enter] > 1e-12) {
        const double rr = t[r][cols] / t[r][enter];
        if (leave == rows || rr < ratio || (bland && rr == ratio && basis[r] < basis[leave])) {
          ratio = rr;
          leave = r;
        }
      }
    }
    if (leave == rows) break;  // unbounded direction cannot occur in phase 1
    const double piv = t[leave][enter];
    for (std::size_t c = 0; c <= cols; ++c) t[leave][c] /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = t[r][enter];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) t[r][c] -= f * t[leave][c];
    }
    basis[leave] = enter;
  }
  double residual = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    if (cost(basis[r]) != 0.0) residual += t[r][cols];
  return residual;
}

}  // namespace detail

// Linear feasibility for the truncated moment problem: is there a mixing law
// supported on a uniform grid over [0,1] whose de Finetti moments reproduce u
// within 1e-6? Grid resolution is the number of atoms (>= 1000).
inline bool extendible_check(const UVector& uv, int grid = 4001) {
  if (grid < 1000) throw param_error("extendible_check: grid must have at least 1000 points");
  const std::size_t rows = static_cast<std::size_t>(uv.n) + 1;
  std::vector<std::vector<double>> a(rows, std::vector<double>(static_cast<std::size_t>(grid)));
  for (int g = 0; g < grid; ++g) {
    const double w = static_cast<double>(g) / static_cast<double>(grid - 1);
    for (int i = 0; i <= uv.n; ++i)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)] = pow_int(w, i) * pow_int(1.0 - w, uv.n - i);
  }
  const double residual = detail::equality_feasibility_residual(a, uv.u);
  return residual <= 1e-6;
}

inline void to_json(nlohmann::json& j, const UVector& uv) {
  j = nlohmann::json{{"n", uv.n}, {"u", uv.u}};
}

inline void from_json(const nlohmann::json& j, UVector& uv) {
  uv.n = j.at("n").get<int>();
  uv.u = j.at("u").get<std::vector<double>>();
  uv.validate();
}

inline void to_json(nlohmann::json& j, const MixingLaw& law) {
  j = nlohmann::json::object();
  auto arr = nlohmann::json::array();
  for (const auto& [w, p] : law.atoms) arr.push_back(nlohmann::json::array({w, p}));
  j["atoms"] = arr;
}

inline void from_json(const nlohmann::json& j, MixingLaw& law) {
  law.atoms.clear();
  for (const auto& e : j.at("atoms")) law.atoms.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  law.validate();
}

}  // namespace stodom
