#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stodom/coupling.hpp"
#include "stodom/ising_tree.hpp"
#include "stodom/rng.hpp"

using namespace stodom;

TEST_CASE("constant callback at rho gives identical paths") {
  const double rho = 0.37;
  const NextSiteProb constant = [rho](const BitConfig&) { return rho; };
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto [eta, zeta] = sequential_coupling_sample(constant, rho, 16, seed);
    CHECK(eta == zeta);
  }
}

TEST_CASE("constant callback at one gives all-ones eta over a product zeta") {
  const double rho = 0.3;
  const NextSiteProb one = [](const BitConfig&) { return 1.0; };
  int zeta_ones = 0;
  const int reps = 2000;
  const int n = 10;
  for (int rep = 0; rep < reps; ++rep) {
    auto [eta, zeta] = sequential_coupling_sample(one, rho, n, 1000 + static_cast<std::uint64_t>(rep));
    for (auto b : eta) REQUIRE(b == 1);
    for (auto b : zeta) zeta_ones += b;
  }
  const double mean = static_cast<double>(zeta_ones) / (reps * n);
  const double se = std::sqrt(rho * (1.0 - rho) / (reps * n));
  CHECK(std::abs(mean - rho) < 3.0 * se);
}

TEST_CASE("tree-chain callback reproduces the closed-form all-zero probability") {
  const ChainTriple chains = chain_matrices(0.8);
  const TreeChainMatrix p = chains.plus;
  const TreeBall ball = tree_ball(2);
  const int n = static_cast<int>(ball.parent.size());
  const double rho = p.p01;

  const NextSiteProb chain_prob = [&](const BitConfig& prefix) {
    if (prefix.empty()) return p.pi1();
    const int parent = ball.parent[prefix.size()];
    return prefix[static_cast<std::size_t>(parent)] ? p.p11 : p.p01;
  };

  const int reps = 200000;
  int all_zero = 0;
  for (int rep = 0; rep < reps; ++rep) {
    auto [eta, zeta] = sequential_coupling_sample(chain_prob, rho, n, 77000 + static_cast<std::uint64_t>(rep));
    bool zero = true;
    for (auto b : eta) zero = zero && b == 0;
    all_zero += zero ? 1 : 0;
    for (std::size_t i = 0; i < eta.size(); ++i) REQUIRE(eta[i] >= zeta[i]);
  }
  const double expected = all_zero_prob_closed_form(p, 2);
  const double hat = static_cast<double>(all_zero) / reps;
  const double se = std::sqrt(expected * (1.0 - expected) / reps);
  CHECK(std::abs(hat - expected) < 3.0 * se);
}

TEST_CASE("coupled pair is ordered for random admissible callbacks") {
  Rng meta(99);
  for (int trial = 0; trial < 200; ++trial) {
    const double rho = meta.next_double();
    const std::uint64_t salt = meta.next_u64();
    // arbitrary history-dependent conditional in [rho, 1]
    const NextSiteProb callback = [rho, salt](const BitConfig& prefix) {
      std::uint64_t h = salt;
      for (auto b : prefix) h = mix64(h ^ b);
      const double x = static_cast<double>(h >> 11) * 0x1.0p-53;
      return rho + (1.0 - rho) * x;
    };
    auto [eta, zeta] = sequential_coupling_sample(callback, rho, 24, meta.next_u64());
    for (std::size_t i = 0; i < eta.size(); ++i) REQUIRE(eta[i] >= zeta[i]);
  }
}

TEST_CASE("callback below rho is a contract violation") {
  const NextSiteProb bad = [](const BitConfig&) { return 0.2; };
  CHECK_THROWS_AS(sequential_coupling_sample(bad, 0.5, 4, 1), hypothesis_error);
}
