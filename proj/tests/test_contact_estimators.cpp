#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stodom/contact_estimators.hpp"

using namespace stodom;

TEST_CASE("block-zero estimates respect the certified-density bound") {
  AnParams p;
  p.beta = 6.0;
  p.p = 0.5;
  p.horizon = 40.0;
  p.replicas = 3000;
  p.seed = 101;
  const double one_minus_rho = 1.0 - certified_rho(p.beta, p.p);  // = 2/3
  for (int n = 1; n <= 4; ++n) {
    p.n = n;
    const AnReport r = a_n_estimate(p);
    CHECK(r.estimate.point <= pow_int(one_minus_rho, n) + 3.0 * r.estimate.stderr_value +
                                  r.survived_fraction);
    // the bound should in fact hold without the survival slack
    CHECK(r.estimate.point <= pow_int(one_minus_rho, n) + 3.0 * r.estimate.stderr_value);
  }
}

TEST_CASE("single-site bound at strong infection") {
  AnParams p;
  p.beta = 8.0;
  p.n = 0;
  p.horizon = 40.0;
  p.replicas = 3000;
  p.seed = 103;
  const AnReport r = a_n_estimate(p);
  CHECK(r.estimate.point <= 4.0 / p.beta + 3.0 * r.estimate.stderr_value);
}

TEST_CASE("no infection means certain extinction") {
  AnParams p;
  p.beta = 0.0;
  p.n = 2;
  p.horizon = 20.0;
  p.replicas = 200;
  p.seed = 104;
  const AnReport r = a_n_estimate(p);
  CHECK(r.estimate.point == 1.0);
  CHECK(r.survived_fraction == 0.0);
}

TEST_CASE("renewal measure upper-bounds the block probabilities") {
  for (double beta : {4.0, 6.0}) {
    AnParams p;
    p.beta = beta;
    p.horizon = 40.0;
    p.replicas = 3000;
    p.seed = 107;
    for (int n = 0; n <= 4; ++n) {
      p.n = n;
      const AnReport r = a_n_estimate(p);
      CHECK(r.estimate.point <=
            renewal_block_prob(beta, n) + 3.0 * r.estimate.stderr_value + r.survived_fraction);
    }
  }
}

TEST_CASE("dual and direct estimators agree", "[slow]") {
  AnParams p;
  p.beta = 6.0;
  p.p = 0.5;
  p.n = 2;
  p.horizon = 20.0;
  p.replicas = 2500;
  p.seed = 109;
  const AnReport dual = a_n_estimate(p);
  const AnReport direct = a_n_direct_estimate(p);
  const double gap = std::abs(dual.estimate.point - direct.estimate.point);
  CHECK(gap < 3.0 * (dual.estimate.stderr_value + direct.estimate.stderr_value) + 0.01);
}

TEST_CASE("conditional zero-run ratios are nondecreasing", "[slow]") {
  // f(l) = a(l+1)/a(l) increases in l; compare within propagated bands
  AnParams p;
  p.beta = 6.0;
  p.horizon = 40.0;
  p.replicas = 6000;
  p.seed = 111;
  double a[4], se[4];
  for (int n = 0; n <= 3; ++n) {
    p.n = n;
    const AnReport r = a_n_estimate(p);
    a[n] = r.estimate.point;
    se[n] = r.estimate.stderr_value;
    REQUIRE(a[n] > 0.0);
  }
  for (int l = 0; l + 2 <= 3; ++l) {
    const double f0 = a[l + 1] / a[l];
    const double f1 = a[l + 2] / a[l + 1];
    const double f0_se = f0 * std::sqrt(std::pow(se[l + 1] / a[l + 1], 2) + std::pow(se[l] / a[l], 2));
    const double f1_se = f1 * std::sqrt(std::pow(se[l + 2] / a[l + 2], 2) + std::pow(se[l + 1] / a[l + 1], 2));
    CHECK(f1 - f0 > -3.0 * (f0_se + f1_se));
  }
}

TEST_CASE("density interval brackets the certificate", "[slow]") {
  RhoIntervalParams p;
  p.beta = 6.0;
  p.n_max = 4;
  p.horizon = 40.0;
  p.replicas = 3000;
  p.seed = 113;
  const RhoInterval interval = rho_interval(p);
  CHECK_THAT(interval.rho_lo, Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
  CHECK(interval.rho_hi >= interval.rho_lo);
  CHECK(interval.rho_hi <= 1.0);
  CHECK(interval.block_estimates.size() == 4);
}

TEST_CASE("star experiment at a single leaf", "[slow]") {
  StarParams p;
  p.lambda = 8.0;
  p.n_star = 1;
  p.replicas = 1500;
  p.seed = 115;
  p.sample_time = 15.0;
  const StarReport r = star_graph_experiment(p);
  CHECK_THAT(r.rho_certified, Catch::Matchers::WithinAbs(0.5, 1e-15));
  // domination forces P(leaf occupied) >= rho; the all-ones surrogate
  // underestimates the all-zero probability, so the inequality is clean
  CHECK(r.p_all_zero.point <= (1.0 - r.rho_certified) + 3.0 * r.p_all_zero.stderr_value);
  CHECK(r.analytic_lower <= r.p_all_zero.point + 3.0 * (r.p_all_zero.stderr_value + r.p_origin_quiet.stderr_value));
  CHECK(r.bound_pow == 0.5);
}

TEST_CASE("star experiment with no leaves is vacuous") {
  StarParams p;
  p.lambda = 6.0;
  p.n_star = 0;
  p.replicas = 150;
  p.seed = 117;
  p.sample_time = 5.0;
  const StarReport r = star_graph_experiment(p);
  CHECK(r.p_all_zero.point == 1.0);
  CHECK(r.bound_pow == 1.0);
}

TEST_CASE("rectangle comparison: deterministic pieces") {
  RectangleParams p;
  p.lambda = 3.0;
  p.rho = 0.2;
  p.flip_rate = 1.0;
  p.replicas = 400;
  p.burn_in = 6.0;
  p.seed = 119;

  // rho = 0 keeps the flip value at one
  RectangleParams trivial = p;
  trivial.rho = 0.0;
  trivial.n_sites = 3;
  trivial.duration = 2.0;
  const RectangleReport triv = spacetime_rectangle(trivial);
  CHECK(triv.flip_exact == 1.0);
  CHECK(triv.contact_estimate.point <= 1.0);

  // area decay crosses the perimeter-style renewal reference on {4, 6, 8}
  double flip[3], reference[3];
  int i = 0;
  for (int n : {4, 6, 8}) {
    RectangleParams q = p;
    q.n_sites = n;
    q.duration = n;
    q.replicas = 400;
    const RectangleReport r = spacetime_rectangle(q);
    flip[i] = r.flip_exact;
    reference[i] = r.renewal_reference;
    CHECK_THAT(r.flip_exact,
               Catch::Matchers::WithinRel(pow_int(0.8, n) * std::exp(-0.2 * n * n), 1e-12));
    ++i;
  }
  CHECK(flip[0] > reference[0]);
  CHECK(flip[1] < reference[1]);
  CHECK(flip[2] < reference[2]);
}

TEST_CASE("rectangle comparison: short horizon consistency", "[slow]") {
  RectangleParams p;
  p.lambda = 3.0;
  p.rho = 0.2;
  p.n_sites = 2;
  p.duration = 0.0;
  p.replicas = 4000;
  p.burn_in = 12.0;
  p.seed = 121;
  const RectangleReport r = spacetime_rectangle(p);
  CHECK_THAT(r.flip_exact, Catch::Matchers::WithinAbs(0.64, 1e-12));
  // at T = 0 the monitored event is just the N-site block being empty
  CHECK(std::abs(r.contact_estimate.point - r.a_hat_n) <
        3.0 * r.contact_estimate.stderr_value + 0.02);
}

TEST_CASE("two-sided conditional probe") {
  const TwoSidedReport r = two_sided_conditional(6.0, 0.5, 1, 1, 15.0, 4000, 123);
  CHECK(r.conditional.point >= 0.0);
  CHECK(r.conditional.point <= 1.0);
  CHECK(r.conditioning_hits >= 0);
  CHECK_THROWS_AS(two_sided_conditional(6.0, 0.5, 4, 1, 15.0, 500, 1), size_error);
}
