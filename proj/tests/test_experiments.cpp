#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "selfconsume/experiments.hpp"

using namespace selfconsume;

TEST_CASE("single-stage loss matches the closed form") {
  McConfig cfg;
  cfg.trials = 4000;
  cfg.estimator = EstimatorKind::PerBatchEmpirical;
  const Schedule s(std::vector<std::int64_t>{100}, {1.0});
  const LossCurve c = mc_loss(Simplex({0.5, 0.5}), s, cfg);
  REQUIRE(c.stages.size() == 1);
  CHECK(std::abs(c.mean_l2[0] - 0.005) < 4.0 * c.stderr_l2[0]);
  CHECK(c.stderr_l2[0] > 0.0);
}

TEST_CASE("results are identical for any worker count and seed-stable") {
  McConfig a;
  a.trials = 200;
  a.workers = 1;
  McConfig b = a;
  b.workers = 4;
  const Schedule s = schedule_poly({1.0, 1.0, 0.5, 6});
  const Simplex p({0.3, 0.7});
  const LossCurve ca = mc_loss(p, s, a);
  const LossCurve cb = mc_loss(p, s, b);
  CHECK(ca.mean_l2 == cb.mean_l2);
  CHECK(ca.stderr_l1 == cb.stderr_l1);
  McConfig other = a;
  other.master_seed = 43;
  CHECK(mc_loss(p, s, other).mean_l2 != ca.mean_l2);
}

TEST_CASE("worst case over the two-member family") {
  Rng rng(RngSeed{1, 0});
  const AssouadFamily fam = assouad_family(2, 0.5, 16, rng);
  McConfig cfg;
  cfg.trials = 3000;
  cfg.estimator = EstimatorKind::PerBatchEmpirical;
  const Schedule s(std::vector<std::int64_t>{100}, {1.0});
  const WorstCaseCurve wc = worstcase_loss(fam, s, cfg);
  // Both members have entries 0.75/0.25: worst l2^2 mean is 2*0.1875/100.
  CHECK(std::abs(wc.curve.mean_l2[0] - 0.00375) < 4.0 * wc.curve.stderr_l2[0]);
  CHECK(wc.argmax_l2[0] < 2);
  const WorstCaseCurve again = worstcase_loss(fam, s, cfg);
  CHECK(again.argmax_l2 == wc.argmax_l2);
  CHECK(again.curve.mean_l2 == wc.curve.mean_l2);
}

TEST_CASE("rate fit recovers an exact power law") {
  std::vector<std::size_t> stages;
  std::vector<double> values;
  for (std::size_t t = 0; t <= 25; ++t) {
    stages.push_back(t);
    values.push_back(3.0 * std::pow(t + 1.0, -1.5));
  }
  const RateFit f = fit_rate_values(stages, values, 0);
  CHECK(f.exponent == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.points == 26);
  values[3] = 0.0;  // non-positive points are skipped
  const RateFit g = fit_rate_values(stages, values, 0);
  CHECK(g.points == 25);
  CHECK(g.exponent == doctest::Approx(-1.5).epsilon(1e-10));
  CHECK_THROWS_AS(fit_rate_values({0, 1, 2}, {1.0, 0.0, 0.0}, 0), std::invalid_argument);
}

TEST_CASE("regime classification on the table rows") {
  CHECK(classify_regime(1.0, 0.5).label == RegimeLabel::MatchingDecayKFree);
  CHECK(classify_regime(0.0, 0.75).label == RegimeLabel::NonMatchingDominatedByH);
  CHECK(classify_regime(1.0, 0.0).label == RegimeLabel::AlphaOmegaOne);
  CHECK(classify_regime(1.0, 1.0).label == RegimeLabel::MatchingDecay);
  CHECK(classify_regime(0.0, 0.5).label == RegimeLabel::MatchingDecay);
  CHECK_FALSE(classify_regime(1.0, 0.5).caveat);
  const RegimeClassification fresh = classify_regime(1.0, 1.2);
  CHECK(fresh.label == RegimeLabel::FreshDominates);
  CHECK(fresh.caveat);
  const RegimeClassification floor = classify_regime(1.0, 2.5);
  CHECK(floor.label == RegimeLabel::ConstantLossFloor);
  CHECK(floor.caveat);
  CHECK(classify_regime(PolyScheduleParams{1.0, 1.0, 0.5, 40}).label ==
        RegimeLabel::MatchingDecayKFree);
  CHECK(regime_label_name(RegimeLabel::MatchingDecay) != "");
}

TEST_CASE("oracle workflow tracks pooled estimation when alpha stays one") {
  const Schedule s = schedule_constant(50, 1.0, 3);
  McConfig oc;
  oc.trials = 2000;
  oc.workflow = Workflow::Oracle;
  oc.estimator = EstimatorKind::OracleEmpirical;
  McConfig pc;
  pc.trials = 2000;
  pc.estimator = EstimatorKind::PooledEmpirical;
  const Simplex p = Simplex::uniform(2);
  const LossCurve co = mc_loss(p, s, oc);
  const LossCurve cp = mc_loss(p, s, pc);
  for (std::size_t t = 0; t <= 3; ++t) {
    CHECK(std::abs(co.mean_l2[t] - cp.mean_l2[t]) <
          4.0 * (co.stderr_l2[t] + cp.stderr_l2[t]));
    const OracleBounds ob = oracle_bounds(50.0 * (t + 1), 2);
    CHECK(co.mean_l2[t] <= ob.upper + 4.0 * co.stderr_l2[t]);
  }
}

TEST_CASE("combiner stays under its risk bound on a worst-case run") {
  Rng rng(RngSeed{2, 0});
  const AssouadFamily fam = assouad_family(2, 0.5, 16, rng);
  const Schedule s = schedule_poly({1.0, 1.0, 0.5, 10});
  McConfig cfg;
  cfg.trials = 500;
  const WorstCaseCurve wc = worstcase_loss(fam, s, cfg);
  for (std::size_t t = 0; t <= 10; ++t) {
    const double u = upper_bound(effective_sums(s, t).sum_na2, 2, LossKind::L2Squared);
    CHECK(wc.curve.mean_l2[t] <= u + 4.0 * wc.curve.stderr_l2[t]);
  }
}

TEST_CASE("lower-bound curve: raw tail factor never exceeds the capped one") {
  const Schedule s = schedule_poly({1.0, 0.0, 0.75, 12});
  const std::vector<double> losses(13, 0.02);
  const auto capped = lower_bound_curve(s, 2, losses, true);
  const auto raw = lower_bound_curve(s, 2, losses, false);
  REQUIRE(capped.size() == 13);
  for (std::size_t t = 0; t < 13; ++t) {
    if (raw[t] && capped[t]) CHECK(*raw[t] <= *capped[t] + 1e-15);
  }
  // With zero measured losses the history term vanishes.
  const auto clean = lower_bound_curve(s, 2, std::vector<double>(13, 0.0), true);
  for (std::size_t t = 0; t < 13; ++t) {
    const auto direct = lower_bound(effective_sums(s, t).sum_na2, 0.0, 2, LossKind::L2Squared);
    CHECK(clean[t].has_value() == direct.has_value());
    if (direct) CHECK(*clean[t] == doctest::Approx(*direct));
  }
}

TEST_CASE("claim and replacement reports populate their fields at small scale") {
  ClaimConfig c1;
  c1.horizon = 12;
  c1.trials = 200;
  c1.workers = 2;
  const Claim1Report r1 = claim1_experiment(c1);
  CHECK(r1.combiner.stages.size() == 13);
  CHECK(r1.oracle.stages.size() == 13);
  CHECK(r1.ratio.size() == 13);
  CHECK(r1.regime.label == RegimeLabel::MatchingDecayKFree);
  CHECK(r1.combiner_fit.predicted == doctest::Approx(-1.5));
  CHECK(r1.oracle_fit.predicted == doctest::Approx(-2.0));
  CHECK(r1.ratio_fit.predicted == doctest::Approx(0.5));

  ClaimConfig c2;
  c2.beta = 0.0;
  c2.gamma = 0.75;
  c2.horizon = 12;
  c2.trials = 200;
  c2.workers = 2;
  const Claim2Report r2 = claim2_experiment(c2);
  CHECK(r2.lower_curve.size() == 13);
  CHECK(r2.h_values.size() == 13);
  CHECK(r2.combiner_fit.predicted == doctest::Approx(-0.25));
  CHECK(r2.lower_fit.predicted == doctest::Approx(-0.5));

  ReplacementConfig rc;
  rc.n = 100;
  rc.horizon = 6;
  rc.trials = 300;
  rc.workers = 2;
  const ReplacementReport rr = replacement_floor_experiment(rc);
  CHECK(rr.replacement.stages.size() == 7);
  CHECK(rr.accumulation.stages.size() == 7);
  CHECK(rr.floor > 0.0);
  CHECK(rr.measured_sup >= rr.replacement.mean_l2[0]);
}
