#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "stodom/common.hpp"
#include "stodom/maxflow.hpp"
#include "stodom/measure.hpp"
#include "stodom/upsets.hpp"

namespace stodom {

namespace detail {

// Weight mass of a set of configurations given as a bitmask (n <= 4).
inline std::vector<double> config_set_sums(const FiniteMeasure& mu) {
  const std::size_t nconf = mu.size();
  std::vector<double> sums(std::size_t{1} << nconf, 0.0);
  for (std::size_t m = 1; m < sums.size(); ++m) {
    const std::size_t low = m & (~m + 1);
    sums[m] = sums[m ^ low] + mu.weights[static_cast<std::size_t>(__builtin_ctzll(low))];
  }
  return sums;
}

inline double up_set_mass(const FiniteMeasure& mu, std::uint32_t member) {
  double s = 0.0;
  for (std::uint32_t c = 0; c < mu.size(); ++c)
    if ((member >> c) & 1u) s += mu.weights[c];
  return s;
}

}  // namespace detail

// Up-set criterion: mu(U) >= nu(U) for every up-set U. Exact for n <= 5.
inline bool dominates_upsets(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  if (mu.n != nu.n) throw param_error("dominates: measures must share n");
  if (mu.n > 5) throw size_error("dominates_upsets: n > 5");
  const UpSetFamily fam = enumerate_up_sets(mu.n);
  for (std::uint32_t u : fam.sets) {
    if (detail::up_set_mass(mu, u) + kWeightTol < detail::up_set_mass(nu, u)) return false;
  }
  return true;
}

// Coupling feasibility: a monotone coupling of (mu, nu) exists iff the
// bipartite flow from mu-configurations x to nu-configurations y <= x carries
// the whole unit mass. Weights are scaled to integers (scale 1e9) with the
// largest entry absorbing the rounding defect. Feasibility is declared with a
// slack of 2^(n+1)+2 units: each entry rounds by at most half a unit, so a
// cut that is tight in exact arithmetic can lose that much to rounding.
// False positives are bounded by the slack over the scale (~8e-6 mass at
// n = 12), false negatives only occur for deficits beyond it.
inline bool dominates_maxflow(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  if (mu.n != nu.n) throw param_error("dominates: measures must share n");
  if (mu.n > 12) throw size_error("dominates_maxflow: n > 12");
  constexpr std::int64_t kScale = 1000000000;

  auto scaled = [](const std::vector<double>& w) {
    std::vector<std::int64_t> s(w.size());
    std::int64_t total = 0;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      s[i] = std::llround(w[i] * static_cast<double>(kScale));
      total += s[i];
      if (w[i] > w[largest]) largest = i;
    }
    s[largest] += kScale - total;
    return s;
  };
  const std::vector<std::int64_t> cap_mu = scaled(mu.weights);
  const std::vector<std::int64_t> cap_nu = scaled(nu.weights);

  const int nconf = 1 << mu.n;
  const int source = 0;
  const int sink = 2 * nconf + 1;
  MaxFlow flow(2 * nconf + 2);
  for (int x = 0; x < nconf; ++x) {
    if (cap_mu[static_cast<std::size_t>(x)] > 0)
      flow.add_edge(source, 1 + x, cap_mu[static_cast<std::size_t>(x)]);
    if (cap_nu[static_cast<std::size_t>(x)] > 0)
      flow.add_edge(1 + nconf + x, sink, cap_nu[static_cast<std::size_t>(x)]);
  }
  for (std::uint32_t x = 0; x < static_cast<std::uint32_t>(nconf); ++x) {
    if (cap_mu[x] <= 0) continue;
    // All y <= x in the coordinatewise order are the submasks of x.
    std::uint32_t sub = x;
    while (true) {
      if (cap_nu[sub] > 0) flow.add_edge(1 + static_cast<int>(x), 1 + nconf + static_cast<int>(sub), kScale);
      if (sub == 0) break;
      sub = (sub - 1) & x;
    }
  }
  const std::int64_t slack = (std::int64_t{2} << mu.n) + 2;
  return flow.run(source, sink) >= kScale - slack;
}

// Strassen domination oracle. Dispatches to the up-set criterion for n <= 5
// and to coupling feasibility via max flow for 6 <= n <= 12; the two methods
// agree wherever both are defined.
inline bool dominates(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  if (mu.n != nu.n) throw param_error("dominates: measures must share n");
  if (mu.n > 12) throw size_error("dominates: n > 12");
  if (mu.n <= 5) return dominates_upsets(mu, nu);
  return dominates_maxflow(mu, nu);
}

// FKG lattice condition: mu(x|y) mu(x&y) >= mu(x) mu(y) for every pair.
inline bool fkg_lattice_check(const FiniteMeasure& mu) {
  if (mu.n > 12) throw size_error("fkg_lattice_check: n > 12");
  const std::uint32_t nconf = 1u << mu.n;
  for (std::uint32_t x = 0; x < nconf; ++x) {
    for (std::uint32_t y = x + 1; y < nconf; ++y) {
      if ((x & y) == x || (x & y) == y) continue;  // comparable pairs hold with equality
      const double lhs = mu.weights[x | y] * mu.weights[x & y];
      const double rhs = mu.weights[x] * mu.weights[y];
      if (lhs + kWeightTol < rhs) return false;
    }
  }
  return true;
}

// Downward FKG: conditioned on {eta == 0 on A} for any site set A of positive
// probability, all pairs of up-set indicators have nonnegative covariance.
// Zero-probability conditioning events are skipped.
inline bool downward_fkg_check(const FiniteMeasure& mu) {
  if (mu.n > 4) throw size_error("downward_fkg_check: n > 4");
  const std::uint32_t nconf = 1u << mu.n;
  const std::vector<double> sums = detail::config_set_sums(mu);
  const UpSetFamily fam = enumerate_up_sets(mu.n);

  for (std::uint32_t a = 0; a < nconf; ++a) {
    std::uint32_t event = 0;  // configurations vanishing on A
    for (std::uint32_t c = 0; c < nconf; ++c)
      if ((c & a) == 0) event |= (1u << c);
    const double z = sums[event];
    if (z <= 0.0) continue;
    for (std::size_t i = 0; i < fam.sets.size(); ++i) {
      const double pu = sums[fam.sets[i] & event] / z;
      for (std::size_t j = i; j < fam.sets.size(); ++j) {
        const double pv = sums[fam.sets[j] & event] / z;
        const double puv = sums[fam.sets[i] & fam.sets[j] & event] / z;
        if (puv - pu * pv < -kWeightTol) return false;
      }
    }
  }
  return true;
}

}  // namespace stodom
