#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "selfconsume/estimators.hpp"
#include "selfconsume/rng.hpp"
#include "selfconsume/sampling.hpp"
#include "selfconsume/simplex.hpp"

using namespace selfconsume;

TEST_CASE("empirical and pooled estimates") {
  const Batch b{{30, 70}, 100};
  const Simplex e = empirical(b);
  CHECK(e[0] == doctest::Approx(0.3));
  CHECK(e[1] == doctest::Approx(0.7));

  const std::vector<Batch> bs = {Batch{{1, 3}, 4}, Batch{{2, 2}, 4}};
  const Simplex pooled = pooled_empirical(bs);
  CHECK(pooled[0] == doctest::Approx(3.0 / 8));
  CHECK(pooled[1] == doctest::Approx(5.0 / 8));
}

TEST_CASE("debiasing inverts the mixture exactly") {
  const Simplex emp({0.4, 0.6});
  const Simplex phat({0.5, 0.5});
  const std::vector<double> d = debias(emp, phat, 0.5);
  CHECK(d[0] == doctest::Approx(0.3));
  CHECK(d[1] == doctest::Approx(0.7));

  const std::vector<double> full = debias(emp, phat, 1.0);
  CHECK(full[0] == doctest::Approx(0.4));
  CHECK_THROWS_AS(debias(emp, phat, 0.0), std::invalid_argument);

  // Components may leave [0, 1] but the total mass stays 1.
  const std::vector<double> wild = debias(Simplex({0.0, 1.0}), Simplex({0.9, 0.1}), 0.5);
  CHECK(wild[0] == doctest::Approx(-0.9));
  CHECK(wild[1] == doctest::Approx(1.9));
  CHECK(wild[0] + wild[1] == doctest::Approx(1.0));
}

TEST_CASE("combiner init and one step on frozen numbers") {
  CombinerState st = combiner_init(Batch{{50, 50}, 100});
  CHECK(st.estimate[0] == doctest::Approx(0.5));
  CHECK(st.eta == doctest::Approx(0.01));
  CHECK(st.valid);

  // n = 100, alpha = 1: w = 100 / (100 + 100) = 1/2, eta -> 1/200.
  st = combiner_step(st, Batch{{70, 30}, 100}, 1.0);
  CHECK(st.estimate[0] == doctest::Approx(0.6));
  CHECK(st.estimate[1] == doctest::Approx(0.4));
  CHECK(st.eta == doctest::Approx(0.005));
  CHECK(st.valid);
}

TEST_CASE("combiner flags weights that leave the convex range") {
  // From a single-draw start (eta = 1), alpha = 1/2 gives
  // alpha - alpha^2 = 0.25 > 1/(eta n) = 0.01.
  CombinerState st = combiner_init(Batch{{1, 0}, 1});
  CHECK(st.eta == doctest::Approx(1.0));
  st = combiner_step(st, Batch{{40, 60}, 100}, 0.5);
  CHECK_FALSE(st.valid);
  // The flag latches through later well-behaved steps.
  st = combiner_step(st, Batch{{50, 50}, 100}, 1.0);
  CHECK_FALSE(st.valid);
}

TEST_CASE("combiner ignores batches with alpha zero") {
  CombinerState st = combiner_init(Batch{{25, 75}, 100});
  const CombinerState after = combiner_step(st, Batch{{99, 1}, 100}, 0.0);
  CHECK(after.estimate == st.estimate);
  CHECK(after.eta == doctest::Approx(st.eta));
  CHECK(after.valid);
}

TEST_CASE("combiner output stays on the simplex while valid") {
  const Simplex p({0.2, 0.3, 0.5});
  Rng rng(RngSeed{57, 0});
  for (int rep = 0; rep < 50; ++rep) {
    CombinerState st = combiner_init(draw_batch(p, p, 1.0, 40, rng));
    double alpha = 1.0;
    for (int t = 1; t <= 6; ++t) {
      alpha *= 0.8;
      const Simplex phat = clamp_to_simplex(st.estimate);
      st = combiner_step(st, draw_batch(p, phat, alpha, 40, rng), alpha);
      REQUIRE(st.valid);
      double total = 0.0;
      for (double x : st.estimate) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        total += x;
      }
      CHECK(total == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("combiner stays unbiased when fed mixed batches") {
  const Simplex p({0.3, 0.7});
  Rng rng(RngSeed{61, 0});
  const int reps = 20000;
  double mean0 = 0.0;
  for (int i = 0; i < reps; ++i) {
    CombinerState st = combiner_init(draw_batch(p, p, 1.0, 100, rng));
    const Simplex phat = clamp_to_simplex(st.estimate);
    st = combiner_step(st, draw_batch(p, phat, 0.5, 50, rng), 0.5);
    mean0 += st.estimate[0];
  }
  mean0 /= reps;
  // Variance of the combined estimate is below the stage-zero value pq/100.
  const double se = std::sqrt(0.3 * 0.7 / 100.0 / reps);
  CHECK(std::abs(mean0 - 0.3) < 4.0 * se);
}

TEST_CASE("debiased per-batch statistics match the two-stage theory") {
  // Stage 0: empirical on n0 = 100 real draws.  Stage 1: batch of n1 = 100
  // with alpha = 0.4.  Writing V0 = p(1-p)/n0 and eta = 1/n0:
  //   cov(emp1, phat0)   = (1-alpha) V0
  //   var(debiased)      = p(1-p) (1 - (1-alpha)^2 eta) / (n1 alpha^2)
  //   cov(debiased, phat0) = 0
  const Simplex p({0.3, 0.7});
  const double alpha = 0.4;
  Rng rng(RngSeed{71, 0});
  const int reps = 40000;
  double s_phat = 0.0, s_emp = 0.0, s_deb = 0.0;
  double s_pe = 0.0, s_pd = 0.0, s_pp = 0.0, s_dd = 0.0;
  for (int i = 0; i < reps; ++i) {
    const Simplex phat0 = empirical(draw_batch(p, p, 1.0, 100, rng));
    const Simplex emp1 = empirical(draw_batch(p, phat0, alpha, 100, rng));
    const double d = debias(emp1, phat0, alpha)[0];
    s_phat += phat0[0];
    s_emp += emp1[0];
    s_deb += d;
    s_pe += phat0[0] * emp1[0];
    s_pd += phat0[0] * d;
    s_pp += phat0[0] * phat0[0];
    s_dd += d * d;
  }
  const double m_phat = s_phat / reps, m_emp = s_emp / reps, m_deb = s_deb / reps;
  const double cov_pe = s_pe / reps - m_phat * m_emp;
  const double cov_pd = s_pd / reps - m_phat * m_deb;
  const double var_p = s_pp / reps - m_phat * m_phat;
  const double var_d = s_dd / reps - m_deb * m_deb;

  const double v0 = 0.3 * 0.7 / 100.0;
  CHECK(std::abs(m_deb - 0.3) < 4.0 * std::sqrt(var_d / reps));
  CHECK(var_p == doctest::Approx(v0).epsilon(0.05));
  CHECK(std::abs(cov_pe - (1.0 - alpha) * v0) < 5e-5);
  CHECK(std::abs(cov_pd) < 5e-5);
  const double var_d_theory = 0.21 * (1.0 - 0.36 * 0.01) / (100.0 * 0.16);
  CHECK(var_d == doctest::Approx(var_d_theory).epsilon(0.05));
}

TEST_CASE("oracle estimate falls back to uniform before any real draw") {
  const Simplex empty = oracle_estimate({0, 0, 0, 0});
  for (std::size_t j = 0; j < 4; ++j) CHECK(empty[j] == doctest::Approx(0.25));
  const Simplex some = oracle_estimate({3, 1});
  CHECK(some[0] == doctest::Approx(0.75));
}
