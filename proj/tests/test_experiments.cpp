#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fkde/experiments.hpp"

using namespace fkde;
using Catch::Approx;

namespace {
const Frontier unit = Frontier::constant(1.0);
const Kernel epa{};
const ExponentPlan good_plan = plan_sequences(1.0, 0.9, 0.5);
} // namespace

TEST_CASE("run_clt report shape and theory", "[experiments][clt]") {
  const auto rep = run_clt(unit, epa, good_plan, {2000, 8000}, 40, 0.5, 9, 2);
  CHECK(rep.sigma_theory == Approx(std::sqrt(3.0 / 5.0)).epsilon(1e-15));
  CHECK(rep.truth == 1.0);
  REQUIRE(rep.per_n.size() == 2);
  for (const auto& p : rep.per_n) {
    CHECK(p.standardized_errors.size() == 40);
    CHECK(p.ks_distance >= 0.0);
    CHECK(p.ks_distance <= 1.0);
    CHECK(p.sd.has_value());
    CHECK(p.scale == Approx(p.n * std::sqrt(p.h) / std::sqrt(double(p.k))));
    CHECK(p.mean == Approx(mean_of(p.standardized_errors)));
  }
  CHECK(rep.per_n[0].k == good_plan.k_for(2000));
}

TEST_CASE("run_clt: KS distance ignores replicate order", "[experiments][clt]") {
  const auto rep = run_clt(unit, epa, good_plan, {3000}, 30, 0.5, 1, 1);
  auto errs = rep.per_n[0].standardized_errors;
  std::reverse(errs.begin(), errs.end());
  const double sigma = rep.sigma_theory;
  CHECK(ks_distance(errs, [&](double z) { return normal_cdf(z / sigma); }) ==
        rep.per_n[0].ks_distance);
}

TEST_CASE("run_clt rejects bad inputs", "[experiments][clt]") {
  CHECK_THROWS_AS(run_clt(unit, epa, good_plan, {2000}, 0, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(run_clt(unit, epa, plan_sequences(1.0, 0.5, 0.5), {2000}, 5, 0.5, 1),
                  ParameterError);
  CHECK_THROWS_AS(run_clt(unit, epa, good_plan, {2000}, 5, 0.02, 1), ParameterError);
  CHECK_THROWS_AS(run_clt(unit, epa, good_plan, {}, 5, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(run_clt(unit, epa, good_plan, {4000, 2000}, 5, 0.5, 1), ParameterError);
  // a frontier declared 0.5-Hoelder cannot back an alpha = 1 plan
  CHECK_THROWS_AS(run_clt(Frontier::piecewise_linear({1.0, 1.0}, 0.5), epa,
                          good_plan, {2000}, 5, 0.5, 1),
                  ParameterError);
}

TEST_CASE("run_clt single replicate reports sd as missing", "[experiments][clt]") {
  const auto rep = run_clt(unit, epa, good_plan, {2000}, 1, 0.5, 3);
  CHECK_FALSE(rep.per_n[0].sd.has_value());
}

TEST_CASE("experiments do not depend on the thread count", "[experiments][determinism]") {
  const auto a = run_clt(Frontier::cosine(1.0, 0.3), epa, good_plan, {3000}, 12, 0.5, 77, 1);
  const auto b = run_clt(Frontier::cosine(1.0, 0.3), epa, good_plan, {3000}, 12, 0.5, 77, 4);
  CHECK(a.per_n[0].standardized_errors == b.per_n[0].standardized_errors);

  const EstimatorParams p{3000, 200, 0.1, epa};
  const auto s1 = run_sandwich(unit, p, 0.05, 20, 0.5, 5, 1);
  const auto s3 = run_sandwich(unit, p, 0.05, 20, 0.5, 5, 3);
  CHECK(s1.mean_estimator_gap == s3.mean_estimator_gap);
  CHECK(s1.en_fail_count == s3.en_fail_count);
}

TEST_CASE("run_sandwich ordering holds pathwise", "[experiments][sandwich]") {
  for (const auto& f : {Frontier::constant(1.0), Frontier::cosine(1.0, 0.3),
                        Frontier::affine(0.5, 1.0)}) {
    for (double gamma : {0.01, 0.05, 0.3}) {
      const EstimatorParams p{2000, 150, 0.1, epa};
      const auto rep = run_sandwich(f, p, gamma, 50, 0.5, 11);
      REQUIRE(rep.ordering_violations == 0);
      REQUIRE(rep.mean_estimator_gap >= 0.0);
    }
  }
}

TEST_CASE("run_sandwich bound bookkeeping", "[experiments][sandwich]") {
  CHECK(lemma2_bound(10000, 0.05) == Approx(2.0 * std::exp(-3.125)).epsilon(1e-15));
  CHECK(lemma2_bound(10000, 0.05) == Approx(0.0879).margin(5e-5));

  const EstimatorParams p{10000, 3981, 0.01, epa};
  const auto rep = run_sandwich(unit, p, 0.05, 40, 0.5, 2);
  CHECK(rep.lemma2_applicable);
  REQUIRE(rep.lemma2_holds.has_value());
  CHECK(rep.p_en_fail_hat >= 0.0);

  // small gamma: the bound is vacuous and not checked
  const auto vac = run_sandwich(unit, p, 1e-4, 20, 0.5, 2);
  CHECK(vac.lemma2_bound == Approx(2.0).margin(1e-4));
  CHECK_FALSE(vac.lemma2_applicable);
  CHECK_FALSE(vac.lemma2_holds.has_value());
  CHECK(vac.replicates == 20);
  CHECK(vac.ordering_violations == 0);

  CHECK_THROWS_AS(run_sandwich(unit, p, 0.0, 5, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(run_sandwich(unit, p, 1.0, 5, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(run_sandwich(unit, p, 0.5, 0, 0.5, 1), ParameterError);
}

TEST_CASE("run_gap_rate basic properties", "[experiments][rate]") {
  const auto rep = run_gap_rate(unit, epa, good_plan, GammaPolicy::inv_sqrt_k(),
                                {2000, 20000}, 30, 4);
  REQUIRE(rep.per_n.size() == 2);
  CHECK_FALSE(rep.wide_variance);
  for (const auto& p : rep.per_n) {
    CHECK(p.min_u_gap >= 0.0);
    CHECK(p.mean_u_gap >= 0.0);
    CHECK(p.gamma == Approx(1.0 / std::sqrt(double(p.k))));
    CHECK(p.ratio == Approx(p.mean_u_gap * p.n / (p.k * p.gamma)));
    // expected ratio is about 2 for a flat frontier
    CHECK(p.ratio > 0.5);
    CHECK(p.ratio < 5.0);
  }
}

TEST_CASE("run_gap_rate degenerate and invalid inputs", "[experiments][rate]") {
  const auto rep = run_gap_rate(unit, epa, good_plan, GammaPolicy::fixed(0.1), {100},
                                1, 4);
  CHECK(rep.wide_variance);
  CHECK(rep.per_n.size() == 1);
  CHECK(rep.per_n[0].gamma == 0.1);
  // n = O(k^(1+alpha)) fails when a (1 + alpha) < 1
  CHECK_THROWS_AS(run_gap_rate(unit, epa, plan_sequences(1.0, 0.4, 0.2),
                               GammaPolicy::inv_sqrt_k(), {1000}, 5, 1),
                  ParameterError);
  CHECK_THROWS_AS(run_gap_rate(unit, epa, good_plan, GammaPolicy::inv_sqrt_k(),
                               {1000, 1000}, 5, 1),
                  ParameterError);
}

TEST_CASE("run_weight_sum is deterministic and support-aware", "[experiments][weights]") {
  const auto pts = run_weight_sum(epa, good_plan, {10000, 100000, 1000000}, 0.5);
  REQUIRE(pts.size() == 3);
  CHECK(std::abs(pts[2].weight_sum - 1) < std::abs(pts[0].weight_sum - 1));
  const auto again = run_weight_sum(epa, good_plan, {10000, 100000, 1000000}, 0.5);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again[i].weight_sum == pts[i].weight_sum);

  for (const auto& p : run_weight_sum(epa, good_plan, {100, 10000, 1000000}, 10.0))
    CHECK(p.weight_sum == 0.0);

  CHECK_THROWS_AS(run_weight_sum(epa, plan_sequences(1.0, 0.5, 0.5), {100}, 0.5),
                  ParameterError);
}
