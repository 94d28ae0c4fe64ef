#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "stodom/common.hpp"
#include "stodom/estimate.hpp"
#include "stodom/measure.hpp"
#include "stodom/quadrature.hpp"
#include "stodom/rng.hpp"

namespace stodom {

enum class Boundary { plus, minus };

struct LatticeGibbsParams {
  double coupling = 0.4;  // J
  int side = 16;          // interior box side L
  Boundary boundary = Boundary::plus;
  std::int64_t sweeps = 2000;
  std::int64_t burn_in = 500;
  int thin = 1;  // keep every thin-th sweep after burn-in
  std::uint64_t seed = 1;

  void validate() const {
    if (coupling < 0.0) throw param_error("LatticeGibbsParams: J must be >= 0");
    if (side < 8) throw param_error("LatticeGibbsParams: L must be >= 8");
    if (burn_in < 1 || sweeps < burn_in) throw param_error("LatticeGibbsParams: need sweeps >= burn_in >= 1");
    if (thin < 1) throw param_error("LatticeGibbsParams: thin must be >= 1");
  }
};

// Single-site heat-bath chain on an L x L box with a frozen boundary ring.
// Spins are +-1 internally; reported configurations use 0/1 with -1 -> 0.
// Sweeps run in checkerboard order, and the uniform for (sweep, site) comes
// from a counter keyed on both, so chains with different boundaries but the
// same seed are coupled through identical uniforms and stay pointwise
// ordered.
class GibbsChain {
 public:
  GibbsChain(double coupling, int side, Boundary boundary, std::uint64_t seed)
      : coupling_(coupling), side_(side), seed_(seed), spin_((static_cast<std::size_t>(side) + 2) * (static_cast<std::size_t>(side) + 2)) {
    const std::int8_t b = boundary == Boundary::plus ? 1 : -1;
    for (std::size_t i = 0; i < spin_.size(); ++i) spin_[i] = b;
    // Interior starts at the boundary value; any start works, this one makes
    // the plus/minus coupling exact from sweep zero.
  }

  int side() const { return side_; }

  void sweep(std::int64_t sweep_index) {
    const std::uint64_t sweep_seed = derive_seed(seed_, static_cast<std::uint64_t>(sweep_index));
    for (int parity = 0; parity < 2; ++parity) {
      for (int y = 1; y <= side_; ++y) {
        for (int x = 1 + ((y + parity) & 1); x <= side_; x += 2) {
          const std::size_t at = idx(x, y);
          const int s = spin_[at - 1] + spin_[at + 1] + spin_[at - row()] + spin_[at + row()];
          const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * coupling_ * static_cast<double>(s)));
          const std::uint64_t u64 = mix64(sweep_seed ^ (0x9e3779b97f4a7c15ULL * (at + 1)));
          const double u = static_cast<double>(u64 >> 11) * 0x1.0p-53;
          spin_[at] = u < p_plus ? 1 : -1;
        }
      }
    }
  }

  std::int8_t spin_at(int x, int y) const { return spin_[idx(x, y)]; }  // 1-based interior coords

  // Interior in raster order, 0/1 convention.
  BitConfig snapshot01() const {
    BitConfig out(static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_));
    for (int y = 1; y <= side_; ++y)
      for (int x = 1; x <= side_; ++x)
        out[static_cast<std::size_t>((y - 1) * side_ + (x - 1))] = spin_[idx(x, y)] > 0 ? 1 : 0;
    return out;
  }

  double magnetization() const {
    double m = 0.0;
    for (int y = 1; y <= side_; ++y)
      for (int x = 1; x <= side_; ++x) m += spin_[idx(x, y)];
    return m / (static_cast<double>(side_) * static_cast<double>(side_));
  }

 private:
  std::size_t row() const { return static_cast<std::size_t>(side_) + 2; }
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * row() + static_cast<std::size_t>(x); }

  double coupling_;
  int side_;
  std::uint64_t seed_;
  std::vector<std::int8_t> spin_;
};

// Heat-bath sampler: snapshots every `thin` sweeps after burn-in.
inline std::vector<BitConfig> gibbs_sample(const LatticeGibbsParams& params) {
  params.validate();
  GibbsChain chain(params.coupling, params.side, params.boundary, params.seed);
  std::vector<BitConfig> out;
  for (std::int64_t s = 0; s < params.sweeps; ++s) {
    chain.sweep(s);
    if (s >= params.burn_in && (s - params.burn_in) % params.thin == 0) out.push_back(chain.snapshot01());
  }
  return out;
}

struct BlockRateReport {
  EstimateCI rate;          // (block-zero probability)^(1/n^2)
  double prob_hat = 0.0;    // raw window frequency
  bool zero_count = false;  // no all-zero window observed
  double rate_upper_bound = 1.0;  // rule-of-three bound when zero_count
  int window = 0;
  LatticeGibbsParams params;
};

// Frequency of an all-zero n x n window under the boxed Gibbs state, averaged
// over all window positions at distance >= L/4 from the boundary, then raised
// to 1/n^2. The plus boundary lowers the all-zero probability, so these
// estimates are conservative for block-decay upper bounds.
inline BlockRateReport block_zero_rate(double coupling, int window, LatticeGibbsParams params) {
  params.coupling = coupling;
  params.validate();
  if (window < 1 || window > 4) throw param_error("block_zero_rate: window must be in [1,4]");
  if (params.side < 8 * window) throw param_error("block_zero_rate: L must be >= 8*window");

  GibbsChain chain(params.coupling, params.side, params.boundary, params.seed);
  const int margin = params.side / 4;
  const int lo = 1 + margin;
  const int hi = params.side - margin - window + 1;
  if (hi < lo) throw param_error("block_zero_rate: no interior window positions");

  std::vector<double> per_snapshot;
  for (std::int64_t s = 0; s < params.sweeps; ++s) {
    chain.sweep(s);
    if (s < params.burn_in || (s - params.burn_in) % params.thin != 0) continue;
    int zero_windows = 0;
    int positions = 0;
    for (int y = lo; y <= hi; ++y) {
      for (int x = lo; x <= hi; ++x) {
        ++positions;
        bool all_zero = true;
        for (int dy = 0; dy < window && all_zero; ++dy)
          for (int dx = 0; dx < window && all_zero; ++dx)
            if (chain.spin_at(x + dx, y + dy) > 0) all_zero = false;
        if (all_zero) ++zero_windows;
      }
    }
    per_snapshot.push_back(static_cast<double>(zero_windows) / static_cast<double>(positions));
  }

  BlockRateReport report;
  report.window = window;
  report.params = params;
  EstimateCI prob = EstimateCI::from_samples(per_snapshot, params.seed);
  report.prob_hat = prob.point;
  const double inv = 1.0 / (static_cast<double>(window) * static_cast<double>(window));
  if (prob.point <= 0.0) {
    report.zero_count = true;
    const double p_ub = 3.0 / static_cast<double>(per_snapshot.size());
    report.rate_upper_bound = std::pow(p_ub, inv);
    report.rate = EstimateCI{0.0, 0.0, prob.replicas, params.seed};
  } else {
    const double rate = std::pow(prob.point, inv);
    // delta method through p -> p^(1/n^2)
    const double se = inv * std::pow(prob.point, inv - 1.0) * prob.stderr_value;
    report.rate = EstimateCI{rate, se, prob.replicas, params.seed};
    report.rate_upper_bound = rate + 3.0 * se;
  }
  return report;
}

// ── Onsager quadrature ───────────────────────────────────────────────────────

// sigma(J) = (1/2 pi^2) int_[0,pi]^2 log[cosh^2 2J - sinh 2J (cos x + cos y)].
// The integrand touches zero only at the origin corner at the critical
// coupling (an integrable log singularity); Gauss-Legendre nodes never sit on
// the corner, and near-critical couplings simply start from a denser grid.
inline QuadratureResult sigma_quadrature(double coupling, QuadratureSpec spec = {}) {
  if (coupling < 0.0) throw param_error("sigma: J must be >= 0");
  const double c2 = std::cosh(2.0 * coupling);
  const double s2 = std::sinh(2.0 * coupling);
  if (std::abs(s2 - 1.0) < 0.05 && spec.nodes < 640) {
    spec.nodes *= 10;
    if (spec.max_nodes < 8 * spec.nodes) spec.max_nodes = 8 * spec.nodes;
  }
  auto integrand = [c2, s2](double x, double y) {
    return std::log(c2 * c2 - s2 * (std::cos(x) + std::cos(y)));
  };
  QuadratureResult r = integrate2d_adaptive(integrand, spec, 0.0, M_PI);
  r.value /= 2.0 * M_PI * M_PI;
  r.error_estimate /= 2.0 * M_PI * M_PI;
  return r;
}

inline double sigma(double coupling, const QuadratureSpec& spec = {}) {
  return sigma_quadrature(coupling, spec).value;
}

// Maximal product density dominated by the plus state on the square lattice:
// 1 - e^{2J} / (2 e^{sigma(J)}).
inline double onsager_rho(double coupling, const QuadratureSpec& spec = {}) {
  return 1.0 - std::exp(2.0 * coupling) / (2.0 * std::exp(sigma(coupling, spec)));
}

// ── Plus/minus boundary probe ────────────────────────────────────────────────

struct PlusMinusProbe {
  BlockRateReport plus;
  BlockRateReport minus;
  double ratio_rate = 1.0;  // (minus prob / plus prob)^(1/n^2), NaN if undefined
};

// Diagnostic: block-zero rates under the two boundaries and their ratio per
// site. Shared-seed chains are pointwise ordered, so the minus-boundary count
// dominates the plus-boundary count replica by replica.
inline PlusMinusProbe plus_minus_probe(double coupling, int window, LatticeGibbsParams params) {
  if (window > 3) throw param_error("plus_minus_probe: window must be <= 3");
  params.boundary = Boundary::plus;
  PlusMinusProbe probe;
  probe.plus = block_zero_rate(coupling, window, params);
  params.boundary = Boundary::minus;
  probe.minus = block_zero_rate(coupling, window, params);
  const double inv = 1.0 / (static_cast<double>(window) * static_cast<double>(window));
  probe.ratio_rate = probe.plus.prob_hat > 0.0
                         ? std::pow(probe.minus.prob_hat / probe.plus.prob_hat, inv)
                         : std::numeric_limits<double>::quiet_NaN();
  return probe;
}

}  // namespace stodom
