#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <set>

#include "stodom/measure.hpp"
#include "stodom/rng.hpp"
#include "stodom/upsets.hpp"

using namespace stodom;

namespace {

// Independent oracle: filter every subset of {0,1}^n for upward closure,
// checking all ordered pairs c <= d directly.
std::set<std::uint32_t> brute_force_up_sets(int n) {
  const std::uint32_t nconf = 1u << n;
  std::set<std::uint32_t> out;
  for (std::uint64_t member = 0; member < (1ull << nconf); ++member) {
    bool closed = true;
    for (std::uint32_t c = 0; c < nconf && closed; ++c) {
      if (!((member >> c) & 1ull)) continue;
      for (std::uint32_t d = 0; d < nconf && closed; ++d) {
        if ((c & d) == c && !((member >> d) & 1ull)) closed = false;
      }
    }
    if (closed) out.insert(static_cast<std::uint32_t>(member));
  }
  return out;
}

}  // namespace

TEST_CASE("product measure matches direct evaluation") {
  const FiniteMeasure m0 = product_measure(1, 0.0);
  CHECK(m0.weights[0] == 1.0);
  CHECK(m0.weights[1] == 0.0);

  const FiniteMeasure half = product_measure(2, 0.5);
  for (double w : half.weights) CHECK(w == 0.25);

  // weight of (1,1,0) at density 1/3 is (1/3)^2 (2/3) = 2/27
  const FiniteMeasure third = product_measure(3, 1.0 / 3.0);
  CHECK_THAT(third.weights[0b011], Catch::Matchers::WithinAbs(2.0 / 27.0, 1e-15));

  double total = 0.0;
  for (double w : third.weights) total += w;
  CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("product measure rejects bad parameters") {
  CHECK_THROWS_AS(product_measure(0, 0.5), param_error);
  CHECK_THROWS_AS(product_measure(21, 0.5), param_error);
  CHECK_THROWS_AS(product_measure(3, -0.1), param_error);
  CHECK_THROWS_AS(product_measure(3, 1.1), param_error);
}

TEST_CASE("configuration partial order") {
  const BitConfig a = config_from_mask(0b010, 3);
  const BitConfig b = config_from_mask(0b011, 3);
  CHECK(config_leq(a, b));
  CHECK_FALSE(config_leq(b, a));
  CHECK(mask_from_config(b) == 0b011);
}

TEST_CASE("up-set enumeration counts are the Dedekind numbers") {
  CHECK(enumerate_up_sets(1).sets.size() == 3);
  CHECK(enumerate_up_sets(2).sets.size() == 6);
  CHECK(enumerate_up_sets(3).sets.size() == 20);
  CHECK(enumerate_up_sets(4).sets.size() == 168);
  CHECK(enumerate_up_sets(5).sets.size() == 7581);
  CHECK_THROWS_AS(enumerate_up_sets(6), size_error);
}

TEST_CASE("up-set enumeration agrees with the brute-force filter") {
  for (int n = 1; n <= 3; ++n) {
    const auto expected = brute_force_up_sets(n);
    const UpSetFamily fam = enumerate_up_sets(n);
    std::set<std::uint32_t> got(fam.sets.begin(), fam.sets.end());
    CHECK(got.size() == fam.sets.size());  // no duplicates
    CHECK(got == expected);
  }
}

TEST_CASE("up-set enumeration agrees with the brute-force filter at n = 4", "[slow]") {
  const auto expected = brute_force_up_sets(4);
  const UpSetFamily fam = enumerate_up_sets(4);
  std::set<std::uint32_t> got(fam.sets.begin(), fam.sets.end());
  CHECK(got == expected);
}

TEST_CASE("up-set family contains the trivial members and only up-sets") {
  for (int n = 1; n <= 5; ++n) {
    const UpSetFamily fam = enumerate_up_sets(n);
    const std::uint32_t full =
        (n == 5) ? 0xffffffffu : ((1u << (1u << n)) - 1u);
    CHECK(std::find(fam.sets.begin(), fam.sets.end(), 0u) != fam.sets.end());
    CHECK(std::find(fam.sets.begin(), fam.sets.end(), full) != fam.sets.end());
    for (std::uint32_t m : fam.sets) CHECK(is_up_set(m, n));
  }
}

TEST_CASE("finite measure JSON round trip") {
  Rng rng(7);
  std::vector<double> w(8);
  double total = 0.0;
  for (auto& x : w) {
    x = rng.next_double_pos();
    total += x;
  }
  for (auto& x : w) x /= total;
  const FiniteMeasure m(3, w);
  nlohmann::json j = m;
  const auto back = j.get<FiniteMeasure>();
  CHECK(back.n == m.n);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(back.weights[i] == m.weights[i]);
}

TEST_CASE("finite measure validation") {
  CHECK_THROWS_AS(FiniteMeasure(2, {0.5, 0.5, 0.5, 0.5}), param_error);
  CHECK_THROWS_AS(FiniteMeasure(2, {1.0, 0.0, 0.0}), param_error);
  CHECK_THROWS_AS(FiniteMeasure(2, {1.5, -0.5, 0.0, 0.0}), param_error);
}
