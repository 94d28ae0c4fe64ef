#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "stodom/common.hpp"
#include "stodom/contact.hpp"
#include "stodom/estimate.hpp"
#include "stodom/ising_lattice.hpp"
#include "stodom/measure.hpp"
#include "stodom/rng.hpp"

namespace stodom {

struct ClusterStats {
  int cluster_count = 0;
  double largest_fraction = 0.0;  // largest cluster / total grid sites
  double open_fraction = 0.0;
  bool crossing_horizontal = false;  // some cluster touches left and right columns
  bool crossing_vertical = false;
};

// Union-find labelling of open (=1) sites with 4-neighbour adjacency on a
// flat rectangular grid (no wraparound).
inline ClusterStats label_clusters(const std::vector<std::uint8_t>& grid, int rows, int cols) {
  if (rows < 1 || cols < 1 || grid.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw param_error("label_clusters: grid dimensions mismatch");
  std::vector<int> parent(grid.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> rank(grid.size(), 0);

  auto find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;
    if (rank[static_cast<std::size_t>(a)] == rank[static_cast<std::size_t>(b)]) ++rank[static_cast<std::size_t>(a)];
  };

  auto at = [&](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!grid[static_cast<std::size_t>(at(r, c))]) continue;
      if (c + 1 < cols && grid[static_cast<std::size_t>(at(r, c + 1))]) unite(at(r, c), at(r, c + 1));
      if (r + 1 < rows && grid[static_cast<std::size_t>(at(r + 1, c))]) unite(at(r, c), at(r + 1, c));
    }
  }

  std::vector<int> size_of(grid.size(), 0);
  std::vector<std::uint8_t> touches_left(grid.size(), 0), touches_right(grid.size(), 0);
  std::vector<std::uint8_t> touches_top(grid.size(), 0), touches_bottom(grid.size(), 0);
  int open = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!grid[static_cast<std::size_t>(at(r, c))]) continue;
      ++open;
      const int root = find(at(r, c));
      ++size_of[static_cast<std::size_t>(root)];
      if (c == 0) touches_left[static_cast<std::size_t>(root)] = 1;
      if (c == cols - 1) touches_right[static_cast<std::size_t>(root)] = 1;
      if (r == 0) touches_top[static_cast<std::size_t>(root)] = 1;
      if (r == rows - 1) touches_bottom[static_cast<std::size_t>(root)] = 1;
    }
  }

  ClusterStats stats;
  int largest = 0;
  for (std::size_t i = 0; i < size_of.size(); ++i) {
    if (size_of[i] == 0) continue;
    ++stats.cluster_count;
    if (size_of[i] > largest) largest = size_of[i];
    if (touches_left[i] && touches_right[i]) stats.crossing_horizontal = true;
    if (touches_top[i] && touches_bottom[i]) stats.crossing_vertical = true;
  }
  stats.open_fraction = static_cast<double>(open) / static_cast<double>(grid.size());
  stats.largest_fraction = static_cast<double>(largest) / static_cast<double>(grid.size());
  return stats;
}

inline ClusterStats label_clusters(const std::vector<std::uint8_t>& grid, int side) {
  return label_clusters(grid, side, side);
}

// ── Crossing-frequency experiments ───────────────────────────────────────────

struct PercSource {
  enum class Kind { product, contact, ising } kind = Kind::product;
  double density = 0.5;        // product
  double lambda = 6.25;        // contact (2-D torus, all-ones start)
  double horizon = 40.0;       // contact sampling time
  double coupling = 1.0;       // ising
  Boundary boundary = Boundary::plus;
  std::int64_t sweeps = 400;   // ising chain length per replica
};

struct PercParams {
  PercSource source;
  int side = 64;
  std::int64_t replicas = 200;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct PercReport {
  EstimateCI crossing_frequency;  // horizontal crossings
  double mean_open_fraction = 0.0;
  PercParams params;
};

// Horizontal-crossing frequency of samples drawn from a product measure, the
// contact process on the torus at a large time from all-ones (which dominates
// the upper invariant measure: the right bias direction for exhibiting
// percolation), or a boxed Ising state. Torus samples are cut to a flat grid
// before labelling.
inline PercReport percolation_experiment(const PercParams& params) {
  if (params.side < 8) throw param_error("percolation_experiment: side must be >= 8");
  const int side = params.side;
  std::vector<double> open_frac(static_cast<std::size_t>(params.replicas), 0.0);

  std::vector<double> crossings = run_replicas(params.replicas, params.threads, [&](std::int64_t rep) {
    const std::uint64_t rep_seed = derive_seed(params.seed, static_cast<std::uint64_t>(rep));
    std::vector<std::uint8_t> grid;
    switch (params.source.kind) {
      case PercSource::Kind::product: {
        Rng rng(rep_seed);
        grid.resize(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
        for (auto& g : grid) g = rng.next_double() < params.source.density ? 1 : 0;
        break;
      }
      case PercSource::Kind::contact: {
        thread_local UniformGraphRunner runner = UniformGraphRunner::torus(2, 1.0);
        thread_local int cached_side = -1;
        thread_local double cached_lambda = -1.0;
        if (cached_side != side || cached_lambda != params.source.lambda) {
          runner = UniformGraphRunner::torus(side, params.source.lambda);
          cached_side = side;
          cached_lambda = params.source.lambda;
        }
        Rng rng(rep_seed);
        runner.reset_all_ones();
        runner.run_until(params.source.horizon, rng);
        grid.resize(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
        for (int v = 0; v < side * side; ++v) grid[static_cast<std::size_t>(v)] = runner.site_infected(v) ? 1 : 0;
        break;
      }
      case PercSource::Kind::ising: {
        GibbsChain chain(params.source.coupling, side, params.source.boundary, rep_seed);
        for (std::int64_t s = 0; s < params.source.sweeps; ++s) chain.sweep(s);
        grid = chain.snapshot01();
        break;
      }
    }
    const ClusterStats stats = label_clusters(grid, side);
    open_frac[static_cast<std::size_t>(rep)] = stats.open_fraction;
    return stats.crossing_horizontal ? 1.0 : 0.0;
  });

  PercReport report;
  report.crossing_frequency = EstimateCI::from_samples(crossings, params.seed);
  double mean_open = 0.0;
  for (double f : open_frac) mean_open += f;
  report.mean_open_fraction = mean_open / static_cast<double>(params.replicas);
  report.params = params;
  return report;
}

}  // namespace stodom
