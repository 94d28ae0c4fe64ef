#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "stodom/common.hpp"
#include "stodom/measure.hpp"
#include "stodom/rng.hpp"

namespace stodom {

// Conditional law of the next site given the sites already revealed.
using NextSiteProb = std::function<double(const BitConfig& prefix)>;

// Sequential monotone coupling. The callback must keep every conditional
// probability of a 1 at or above rho; one shared uniform per site then yields
// eta >= zeta pointwise with eta following the callback's law and zeta a
// product sample of density rho.
inline std::pair<BitConfig, BitConfig> sequential_coupling_sample(const NextSiteProb& next_site_prob,
                                                                  double rho, int n,
                                                                  std::uint64_t seed) {
  if (n < 1) throw param_error("sequential_coupling_sample: n must be >= 1");
  if (!(rho >= 0.0 && rho <= 1.0)) throw param_error("sequential_coupling_sample: rho must be in [0,1]");
  Rng rng(seed);
  BitConfig eta;
  BitConfig zeta;
  eta.reserve(static_cast<std::size_t>(n));
  zeta.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p = next_site_prob(eta);
    if (p < rho || p > 1.0 + kWeightTol)
      throw hypothesis_error("sequential_coupling_sample: conditional probability outside [rho, 1]");
    const double u = rng.next_double();
    eta.push_back(u < p ? 1 : 0);
    zeta.push_back(u < rho ? 1 : 0);
  }
  return {std::move(eta), std::move(zeta)};
}

}  // namespace stodom
