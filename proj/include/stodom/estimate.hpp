#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "stodom/common.hpp"

namespace stodom {

// Monte Carlo point estimate with standard error. Every stochastic operation
// returns one of these (sometimes embedded in a larger report).
struct EstimateCI {
  double point = 0.0;
  double stderr_value = 0.0;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;

  static EstimateCI from_samples(const std::vector<double>& xs, std::uint64_t seed) {
    if (xs.size() < 100) throw param_error("EstimateCI requires at least 100 replicas");
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return EstimateCI{mean, sd / std::sqrt(n), static_cast<std::int64_t>(xs.size()), seed};
  }
};

// Runs fn(replica_index) for i in [0, replicas) across up to `threads` worker
// threads and returns the per-replica outcomes in replica order. Each replica
// must derive its own RNG stream from its index, so the result is independent
// of the thread count.
inline std::vector<double> run_replicas(std::int64_t replicas, int threads,
                                        const std::function<double(std::int64_t)>& fn) {
  if (replicas <= 0) throw param_error("replicas must be positive");
  std::vector<double> out(static_cast<std::size_t>(replicas));
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int nt = threads > 0 ? threads : hw;
  if (nt > replicas) nt = static_cast<int>(replicas);
  if (nt <= 1) {
    for (std::int64_t i = 0; i < replicas; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  const std::int64_t chunk = (replicas + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(replicas, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &out, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace stodom
