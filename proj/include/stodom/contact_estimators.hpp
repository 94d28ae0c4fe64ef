#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "stodom/common.hpp"
#include "stodom/contact.hpp"
#include "stodom/estimate.hpp"
#include "stodom/rng.hpp"

namespace stodom {

// ── Holley–Liggett renewal bound ─────────────────────────────────────────────
//
// Stationary renewal measure whose gap tails are Catalan: P(gap >= k) =
// Cat_k beta^{-k}. Its block-zero probability upper-bounds the contact
// process value for beta >= 4:
//   mu{eta == 0 on [0,n]} = d * sum_{k>n} Cat_k beta^{-k},  d = 1/C(1/beta)
// with C the Catalan generating function. The tail is taken against the
// closed-form total; if cancellation bites (huge n, beta well above 4) the
// series is summed directly with the ratio Cat_{k+1}/Cat_k = (4k+2)/(k+2).
inline double renewal_block_prob(double beta, int n) {
  if (beta < 4.0) throw param_error("renewal_block_prob: beta must be >= 4");
  if (n < 0) throw param_error("renewal_block_prob: n must be >= 0");
  if (n > 1000000) throw size_error("renewal_block_prob: n too large");
  const double total = (1.0 - std::sqrt(1.0 - 4.0 / beta)) * beta / 2.0;  // C(1/beta)
  const double density = 1.0 / total;                                     // mu{eta(0)=1}

  double partial = 0.0;
  double term = 1.0;  // Cat_0 beta^0
  for (int k = 0; k <= n; ++k) {
    partial += term;
    term *= static_cast<double>(4 * k + 2) / (static_cast<double>(k + 2) * beta);
  }
  double tail = total - partial;
  if (tail < 1e-13 * total) {
    if (beta <= 4.0 + 1e-9)
      throw numerical_error("renewal_block_prob: tail cancellation at beta ~ 4");
    tail = 0.0;
    double t = term;  // Cat_{n+1} beta^{-(n+1)}
    const double r_inf = 4.0 / beta;
    for (int k = n + 1;; ++k) {
      tail += t;
      t *= static_cast<double>(4 * k + 2) / (static_cast<double>(k + 2) * beta);
      if (t * r_inf / (1.0 - r_inf) < 1e-14 * tail) {
        tail += t / (1.0 - r_inf);  // geometric closure of the remainder
        break;
      }
    }
  }
  return density * tail;
}

// Certified product density dominated by the upper invariant measure of the
// asymmetric contact process: (beta-4)/beta, clamped at 0. Holds for every p.
inline double certified_rho(double beta, double /*p*/) {
  if (beta < 0.0) throw param_error("certified_rho: beta must be >= 0");
  return beta > 4.0 ? (beta - 4.0) / beta : 0.0;
}

// ── Block-zero probability a(n) via duality ──────────────────────────────────

struct AnParams {
  double beta = 6.0;
  double p = 0.5;
  int n = 0;                 // block [0, n]
  double horizon = 60.0;     // extinction horizon T
  std::int64_t replicas = 10000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware
};

struct AnReport {
  EstimateCI estimate;        // fraction of dual replicas dead by the horizon
  double survived_fraction;   // worst-case underestimate of a(n)
  int segment_sites;
  AnParams params;
};

namespace detail {

// Segment half-width so the process seeded near the origin cannot feel the
// truncation: mean front displacement plus eight standard deviations plus a
// fixed margin.
inline int light_cone_margin(double rate, double t) {
  const double mean = rate * t;
  return static_cast<int>(std::ceil(mean + 8.0 * std::sqrt(mean + 1.0))) + 40;
}

}  // namespace detail

// Estimates a(n) = (upper invariant measure){eta == 0 on [0,n]}, which by
// self-duality is the extinction probability of the process started from
// {0,...,n} with the asymmetry reversed (p -> 1-p). Replicas still alive at
// the horizon count as survived, so the point estimate underestimates a(n) by
// at most the reported survived fraction.
inline AnReport a_n_estimate(const AnParams& params) {
  if (params.beta < 0.0 || params.p < 0.0 || params.p > 1.0)
    throw param_error("a_n_estimate: invalid rates");
  if (params.n < 0) throw param_error("a_n_estimate: n must be >= 0");
  if (!(params.horizon > 0.0)) throw param_error("a_n_estimate: horizon must be positive");

  const double p_dual = 1.0 - params.p;
  const int margin = detail::light_cone_margin(
      params.beta * std::max(p_dual, 1.0 - p_dual), params.horizon);
  const int length = params.n + 1 + 2 * margin;
  std::vector<int> seeds;
  for (int k = 0; k <= params.n; ++k) seeds.push_back(margin + k);

  std::vector<double> outcomes = run_replicas(
      params.replicas, params.threads, [&](std::int64_t rep) {
        thread_local UniformGraphRunner runner = UniformGraphRunner::segment(1, 1.0, 0.5);
        thread_local int cached_length = -1;
        thread_local double cached_beta = -1.0, cached_p = -1.0;
        if (cached_length != length || cached_beta != params.beta || cached_p != p_dual) {
          runner = UniformGraphRunner::segment(length, params.beta, p_dual);
          cached_length = length;
          cached_beta = params.beta;
          cached_p = p_dual;
        }
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(rep)));
        runner.reset_to(seeds);
        runner.run_until(params.horizon, rng);
        return runner.extinct() ? 1.0 : 0.0;
      });

  AnReport report;
  report.estimate = EstimateCI::from_samples(outcomes, params.seed);
  report.survived_fraction = 1.0 - report.estimate.point;
  report.segment_sites = length;
  report.params = params;
  return report;
}

// Direct estimator of a(n): all-ones start on a wide segment run to the
// horizon, then the frequency of the block [0,n] being empty. Underestimates
// a(n) since the all-ones start dominates the upper invariant measure.
inline AnReport a_n_direct_estimate(const AnParams& params) {
  if (params.n < 0) throw param_error("a_n_direct_estimate: n must be >= 0");
  const int margin = detail::light_cone_margin(
      params.beta * std::max(params.p, 1.0 - params.p), params.horizon);
  const int length = params.n + 1 + 2 * margin;

  std::vector<double> outcomes = run_replicas(
      params.replicas, params.threads, [&](std::int64_t rep) {
        thread_local UniformGraphRunner runner = UniformGraphRunner::segment(1, 1.0, 0.5);
        thread_local int cached_length = -1;
        thread_local double cached_beta = -1.0, cached_p = -1.0;
        if (cached_length != length || cached_beta != params.beta || cached_p != params.p) {
          runner = UniformGraphRunner::segment(length, params.beta, params.p);
          cached_length = length;
          cached_beta = params.beta;
          cached_p = params.p;
        }
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(rep)));
        runner.reset_all_ones();
        runner.run_until(params.horizon, rng);
        for (int k = 0; k <= params.n; ++k)
          if (runner.site_infected(margin + k)) return 0.0;
        return 1.0;
      });

  AnReport report;
  report.estimate = EstimateCI::from_samples(outcomes, params.seed);
  report.survived_fraction = 0.0;
  report.segment_sites = length;
  report.params = params;
  return report;
}

// ── Certified density interval ───────────────────────────────────────────────

struct RhoIntervalParams {
  double beta = 6.0;
  double p = 0.5;
  int n_max = 6;
  double horizon = 60.0;
  std::int64_t replicas = 10000;
  std::uint64_t seed = 1;
  int threads = 0;
  double confidence = 0.95;
};

struct RhoInterval {
  double rho_lo = 0.0;   // exact certificate (beta-4)/beta
  double rho_hi = 1.0;   // one-sided confident upper bound on the maximal rho
  std::vector<AnReport> block_estimates;
};

namespace detail {

// Exact one-sided lower confidence bound for a binomial proportion
// (Clopper-Pearson): the p solving P(Bin(n,p) >= k) = alpha.
inline double binomial_lower_bound(std::int64_t k, std::int64_t n, double alpha) {
  if (k <= 0) return 0.0;
  if (k >= n) return std::pow(alpha, 1.0 / static_cast<double>(n));
  auto upper_tail = [&](double p) {
    // sum_{j>=k} C(n,j) p^j (1-p)^{n-j}, accumulated in log space from j = k
    double sum = 0.0;
    double log_term = std::lgamma(static_cast<double>(n) + 1.0) -
                      std::lgamma(static_cast<double>(k) + 1.0) -
                      std::lgamma(static_cast<double>(n - k) + 1.0) +
                      static_cast<double>(k) * std::log(p) +
                      static_cast<double>(n - k) * std::log1p(-p);
    double term = std::exp(log_term);
    for (std::int64_t j = k; j <= n; ++j) {
      sum += term;
      term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * p / (1.0 - p);
      if (term < 1e-18 * (sum + 1e-300)) break;
    }
    return sum;
  };
  double lo = 0.0, hi = static_cast<double>(k) / static_cast<double>(n);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (upper_tail(mid) < alpha)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace detail

// Two-sided certificate for the set of dominated product densities.
// rho_lo is exact; rho_hi inverts the block-zero necessary condition
// a(n) <= (1-rho)^n using per-n Clopper-Pearson lower bounds with a
// Bonferroni split, so rho_hi >= true maximal rho at the requested
// confidence.
inline RhoInterval rho_interval(const RhoIntervalParams& params) {
  if (params.n_max < 1) throw param_error("rho_interval: n_max must be >= 1");
  if (!(params.confidence > 0.0 && params.confidence < 1.0))
    throw param_error("rho_interval: confidence in (0,1)");
  RhoInterval out;
  out.rho_lo = certified_rho(params.beta, params.p);
  const double alpha = (1.0 - params.confidence) / static_cast<double>(params.n_max);
  double best_root = 0.0;
  for (int n = 1; n <= params.n_max; ++n) {
    AnParams ap;
    ap.beta = params.beta;
    ap.p = params.p;
    ap.n = n;
    ap.horizon = params.horizon;
    ap.replicas = params.replicas;
    ap.seed = derive_seed(params.seed, static_cast<std::uint64_t>(n));
    ap.threads = params.threads;
    AnReport rep = a_n_estimate(ap);
    const auto dead = static_cast<std::int64_t>(
        std::llround(rep.estimate.point * static_cast<double>(rep.estimate.replicas)));
    const double lcb = detail::binomial_lower_bound(dead, rep.estimate.replicas, alpha);
    const double root = std::pow(lcb, 1.0 / static_cast<double>(n));
    if (root > best_root) best_root = root;
    out.block_estimates.push_back(std::move(rep));
  }
  out.rho_hi = 1.0 - best_root;
  if (out.rho_hi < out.rho_lo)
    throw numerical_error("rho_interval: interval ends crossed; certificate violated");
  return out;
}

// ── Star-graph experiment ────────────────────────────────────────────────────

// Largest density certified on the half-line with n_star leaves:
// max rho with 4 n <= lambda (1-rho)^n, i.e. 1 - (4n/lambda)^{1/n}, or 0.
inline double star_certified_rho(double lambda, int n_star) {
  if (lambda < 0.0 || n_star < 0) throw param_error("star_certified_rho: invalid parameters");
  if (n_star == 0) return certified_rho(lambda, 0.0);
  const double ratio = 4.0 * static_cast<double>(n_star) / lambda;
  if (ratio >= 1.0) return 0.0;
  return 1.0 - std::pow(ratio, 1.0 / static_cast<double>(n_star));
}

struct StarParams {
  double lambda = 8.0;
  int n_star = 1;
  std::int64_t replicas = 2000;
  std::uint64_t seed = 1;
  double sample_time = 20.0;  // stationarity surrogate horizon
  int threads = 0;
};

struct StarReport {
  EstimateCI p_all_zero;      // underestimates the invariant-measure value
  double rho_certified = 0.0;
  double bound_pow = 1.0;     // (1-rho)^{n_star} at the certified rho
  EstimateCI p_origin_quiet;  // P(origin stays 0 over a window of length m_window)
  double analytic_lower = 0.0;  // p_origin_quiet * (1 - rho/2)^{n_star}
  double m_window = 0.0;
  double sample_time = 0.0;
  int half_line_length = 0;
};

// Samples the one-way half-line-with-leaves process at a large time from the
// all-ones start (which dominates the upper invariant measure, so the
// all-zero probability is underestimated) and reports the analytic
// quantities around the certified density.
inline StarReport star_graph_experiment(const StarParams& params) {
  if (params.lambda < 0.0 || params.n_star < 0) throw param_error("star_graph_experiment: invalid parameters");
  if (!(params.sample_time > 0.0)) throw param_error("star_graph_experiment: sample_time must be positive");
  StarReport report;
  report.rho_certified = star_certified_rho(params.lambda, params.n_star);
  report.bound_pow = pow_int(1.0 - report.rho_certified, params.n_star);
  report.sample_time = params.sample_time;
  const double rho = report.rho_certified;
  const double m_window = rho > 0.0 ? std::log(2.0 / rho) : 0.0;
  report.m_window = m_window;

  // One-way infection: the truncation defect travels toward the origin at
  // edge rate lambda, so the mean front needs the full eight-sigma margin.
  const int length = detail::light_cone_margin(params.lambda, params.sample_time + m_window);
  report.half_line_length = length;
  const GraphSpec graph = GraphSpec::half_line_star(length, params.n_star, params.lambda);
  BitConfig all_ones(static_cast<std::size_t>(graph.vertex_count), 1);

  std::vector<double> zero_outcomes(static_cast<std::size_t>(params.replicas));
  std::vector<double> quiet_outcomes(static_cast<std::size_t>(params.replicas));
  run_replicas(params.replicas, params.threads, [&](std::int64_t rep) {
    FenwickRunner runner(graph);
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(rep)));
    runner.reset(all_ones);
    runner.run_until(params.sample_time, rng);
    bool all_zero = true;
    for (int j = 0; j < params.n_star; ++j)
      if (runner.site_infected(length + j)) all_zero = false;
    zero_outcomes[static_cast<std::size_t>(rep)] = all_zero ? 1.0 : 0.0;

    bool quiet = !runner.site_infected(0);
    if (m_window > 0.0 && quiet) {
      runner.run_until(params.sample_time + m_window, rng,
                       [&](double, int site, EventType type) {
                         if (site == 0 && type == EventType::infect) quiet = false;
                       });
    }
    quiet_outcomes[static_cast<std::size_t>(rep)] = quiet ? 1.0 : 0.0;
    return 0.0;
  });

  report.p_all_zero = EstimateCI::from_samples(zero_outcomes, params.seed);
  report.p_origin_quiet = EstimateCI::from_samples(quiet_outcomes, params.seed);
  report.analytic_lower =
      report.p_origin_quiet.point * pow_int(1.0 - rho / 2.0, params.n_star);
  return report;
}

// ── Space-time rectangle comparison ──────────────────────────────────────────

struct RectangleParams {
  double lambda = 3.0;
  double rho = 0.2;
  double flip_rate = 1.0;  // r
  int n_sites = 4;         // N
  double duration = 4.0;   // T
  std::int64_t replicas = 10000;
  std::uint64_t seed = 1;
  double burn_in = 15.0;  // stationarity surrogate T0
  int threads = 0;
};

struct RectangleReport {
  double flip_exact = 0.0;          // (1-rho)^N exp(-r rho T N)
  EstimateCI contact_estimate;      // P(block empty throughout [0,T]) from the surrogate
  double analytic_factor = 0.0;     // exp(-2 lambda T) * a_hat(N)
  double a_hat_n = 0.0;
  double renewal_reference = 0.0;   // renewal_block_prob(2 lambda, N), exact
  double burn_in = 0.0;
};

// The stationary independent-flip process keeps an N-block empty for time T
// with probability exponentially small in the area N*T; the contact process
// pays only for the perimeter. Both the exact flip value and a Monte Carlo
// contact estimate are reported, with the analytic factor from the
// perimeter bound.
inline RectangleReport spacetime_rectangle(const RectangleParams& params) {
  if (!(params.rho >= 0.0 && params.rho <= 1.0)) throw param_error("spacetime_rectangle: rho in [0,1]");
  if (params.n_sites < 1 || !(params.duration >= 0.0) || params.flip_rate < 0.0 ||
      params.lambda < 0.0)
    throw param_error("spacetime_rectangle: invalid parameters");

  RectangleReport report;
  report.burn_in = params.burn_in;
  report.flip_exact = pow_int(1.0 - params.rho, params.n_sites) *
                      std::exp(-params.flip_rate * params.rho * params.duration *
                               static_cast<double>(params.n_sites));
  report.renewal_reference =
      2.0 * params.lambda >= 4.0 ? renewal_block_prob(2.0 * params.lambda, params.n_sites) : 1.0;

  const double beta = 2.0 * params.lambda;
  const int margin = detail::light_cone_margin(params.lambda, params.burn_in + params.duration);
  const int length = params.n_sites + 2 * margin;
  const int block_lo = margin;

  std::vector<double> outcomes = run_replicas(
      params.replicas, params.threads, [&](std::int64_t rep) {
        thread_local UniformGraphRunner runner = UniformGraphRunner::segment(1, 1.0, 0.5);
        thread_local int cached_length = -1;
        thread_local double cached_beta = -1.0;
        if (cached_length != length || cached_beta != beta) {
          runner = UniformGraphRunner::segment(length, beta, 0.5);
          cached_length = length;
          cached_beta = beta;
        }
        Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(rep)));
        runner.reset_all_ones();
        runner.run_until(params.burn_in, rng);
        for (int k = 0; k < params.n_sites; ++k)
          if (runner.site_infected(block_lo + k)) return 0.0;
        bool hit = false;
        runner.run_until(params.burn_in + params.duration, rng, [&](int site) {
          if (site >= block_lo && site < block_lo + params.n_sites) {
            hit = true;
            return true;  // abort: the block was touched
          }
          return false;
        });
        return hit ? 0.0 : 1.0;
      });
  report.contact_estimate = EstimateCI::from_samples(outcomes, params.seed);

  AnParams ap;
  ap.beta = beta;
  ap.p = 0.5;
  ap.n = params.n_sites - 1;  // block of N sites
  ap.horizon = 60.0;
  ap.replicas = params.replicas;
  ap.seed = derive_seed(params.seed, 0x5eedULL);
  ap.threads = params.threads;
  report.a_hat_n = a_n_estimate(ap).estimate.point;
  report.analytic_factor = std::exp(-2.0 * params.lambda * params.duration) * report.a_hat_n;
  return report;
}

// ── Two-sided conditional probe f(k,l) ───────────────────────────────────────

struct TwoSidedReport {
  EstimateCI conditional;  // P(eta(0)=1 | eta == 0 on [-k,l] \ {0})
  std::int64_t conditioning_hits = 0;
  bool high_variance = false;  // flagged when the conditioning event is rare
};

// Rare-event diagnostic for the vanishing two-sided conditional probability;
// exposed only for k, l <= 3 because the conditioning event shrinks fast.
inline TwoSidedReport two_sided_conditional(double beta, double p, int k, int l,
                                            double horizon, std::int64_t replicas,
                                            std::uint64_t seed, int threads = 0) {
  if (k < 0 || l < 0 || k > 3 || l > 3) throw size_error("two_sided_conditional: k,l must be in [0,3]");
  const int margin = detail::light_cone_margin(beta, horizon);
  const int length = k + l + 1 + 2 * margin;
  const int origin = margin + k;

  std::vector<double> numer(static_cast<std::size_t>(replicas), 0.0);
  std::vector<double> denom(static_cast<std::size_t>(replicas), 0.0);
  run_replicas(replicas, threads, [&](std::int64_t rep) {
    thread_local UniformGraphRunner runner = UniformGraphRunner::segment(1, 1.0, 0.5);
    thread_local int cached_length = -1;
    thread_local double cached_beta = -1.0, cached_p = -1.0;
    if (cached_length != length || cached_beta != beta || cached_p != p) {
      runner = UniformGraphRunner::segment(length, beta, p);
      cached_length = length;
      cached_beta = beta;
      cached_p = p;
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    runner.reset_all_ones();
    runner.run_until(horizon, rng);
    bool zeros = true;
    for (int x = -k; x <= l && zeros; ++x)
      if (x != 0 && runner.site_infected(origin + x)) zeros = false;
    if (zeros) {
      denom[static_cast<std::size_t>(rep)] = 1.0;
      numer[static_cast<std::size_t>(rep)] = runner.site_infected(origin) ? 1.0 : 0.0;
    }
    return 0.0;
  });

  double hits = 0.0, ones = 0.0;
  for (std::size_t i = 0; i < denom.size(); ++i) {
    hits += denom[i];
    ones += numer[i];
  }
  TwoSidedReport report;
  report.conditioning_hits = static_cast<std::int64_t>(hits);
  report.high_variance = hits < 100.0;
  const double ratio = hits > 0.0 ? ones / hits : 0.0;
  const double se = hits > 0.0 ? std::sqrt(ratio * (1.0 - ratio) / hits) : 1.0;
  report.conditional = EstimateCI{ratio, se, static_cast<std::int64_t>(hits), seed};
  return report;
}

}  // namespace stodom
