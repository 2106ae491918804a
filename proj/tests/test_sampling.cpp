#include <doctest.h>

#include <cmath>
#include <vector>

#include "selfconsume/rng.hpp"
#include "selfconsume/sampling.hpp"
#include "selfconsume/simplex.hpp"

using namespace selfconsume;

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(RngSeed{42, 7});
  Rng b(RngSeed{42, 7});
  Rng c(RngSeed{42, 8});
  bool all_equal = true;
  bool any_cross_equal = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_cross_equal = any_cross_equal || (va == c.next_u64());
  }
  CHECK(all_equal);
  CHECK_FALSE(any_cross_equal);

  Rng u(RngSeed{1, 1});
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_unit();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("binomial draws hit the edges exactly") {
  Rng rng(RngSeed{3, 0});
  CHECK(binomial_draw(100, 0.0, rng) == 0);
  CHECK(binomial_draw(100, 1.0, rng) == 100);
  CHECK(binomial_draw(0, 0.5, rng) == 0);
  for (int i = 0; i < 100; ++i) {
    const std::int64_t x = binomial_draw(5, 0.3, rng);
    CHECK(x >= 0);
    CHECK(x <= 5);
  }
}

TEST_CASE("binomial frequencies match the exact pmf for a small case") {
  // n = 4, q = 1/2: pmf is (1, 4, 6, 4, 1) / 16.
  Rng rng(RngSeed{11, 0});
  const int reps = 160000;
  std::vector<double> freq(5, 0.0);
  for (int i = 0; i < reps; ++i) freq[static_cast<std::size_t>(binomial_draw(4, 0.5, rng))] += 1.0;
  const double pmf[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  for (std::size_t j = 0; j < 5; ++j) {
    const double se = std::sqrt(pmf[j] * (1.0 - pmf[j]) / reps);
    CHECK(std::abs(freq[j] / reps - pmf[j]) < 4.0 * se);
  }
}

TEST_CASE("binomial moments in both the walk and mode-centered regimes") {
  struct Case {
    std::int64_t n;
    double q;
  };
  // n q <= 32 or n <= 64 walks from zero; the last two enumerate around the mode.
  const Case cases[] = {{50, 0.3}, {64, 0.9}, {5000, 0.4}, {20000, 0.01}};
  for (const Case& c : cases) {
    Rng rng(RngSeed{17, static_cast<std::uint64_t>(c.n)});
    const int reps = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < reps; ++i) {
      const double x = static_cast<double>(binomial_draw(c.n, c.q, rng));
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / reps;
    const double var = sumsq / reps - mean * mean;
    const double m = static_cast<double>(c.n) * c.q;
    const double v = m * (1.0 - c.q);
    CHECK(std::abs(mean - m) < 4.0 * std::sqrt(v / reps));
    CHECK(std::abs(var - v) < 5.0 * v * std::sqrt(2.0 / (reps - 1)));
  }
}

TEST_CASE("multinomial counts conserve n and respect zero weights") {
  Rng rng(RngSeed{23, 0});
  const std::vector<double> w = {0.2, 0.0, 0.3, 0.5};
  for (int i = 0; i < 200; ++i) {
    const std::vector<std::int64_t> c = multinomial_draw(50, w, rng);
    std::int64_t total = 0;
    for (std::int64_t x : c) total += x;
    CHECK(total == 50);
    CHECK(c[1] == 0);
  }
}

TEST_CASE("multinomial cell means match n w_j") {
  Rng rng(RngSeed{29, 0});
  const std::vector<double> w = {0.2, 0.3, 0.5};
  const int reps = 20000;
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < reps; ++i) {
    const std::vector<std::int64_t> c = multinomial_draw(100, w, rng);
    for (std::size_t j = 0; j < 3; ++j) mean[j] += static_cast<double>(c[j]);
  }
  for (std::size_t j = 0; j < 3; ++j) {
    mean[j] /= reps;
    const double se = std::sqrt(100.0 * w[j] * (1.0 - w[j]) / reps);
    CHECK(std::abs(mean[j] - 100.0 * w[j]) < 4.0 * se);
  }
}

TEST_CASE("batches draw from the alpha mixture of p and the previous estimate") {
  const Simplex p({0.9, 0.1});
  const Simplex phat({0.1, 0.9});
  Rng rng(RngSeed{31, 0});
  const int reps = 10000;
  double mean0 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const Batch b = draw_batch(p, phat, 0.25, 200, rng);
    CHECK(b.n == 200);
    CHECK(b.counts[0] + b.counts[1] == 200);
    mean0 += static_cast<double>(b.counts[0]);
  }
  mean0 /= reps;
  // mixture weight on category 0: 0.25 * 0.9 + 0.75 * 0.1 = 0.3
  const double se = std::sqrt(200.0 * 0.3 * 0.7 / reps);
  CHECK(std::abs(mean0 - 60.0) < 4.0 * se);
}

TEST_CASE("oracle batches split real and synthetic draws by source") {
  const Simplex p({0.5, 0.5});
  const Simplex phat({1.0, 0.0});
  Rng rng(RngSeed{37, 0});
  const int reps = 10000;
  double real_total = 0.0, real1 = 0.0, synth1 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const OracleBatch b = draw_oracle_batch(p, phat, 0.3, 100, rng);
    std::int64_t rt = b.real_counts[0] + b.real_counts[1];
    std::int64_t st = b.synthetic_counts[0] + b.synthetic_counts[1];
    CHECK(rt + st == 100);
    real_total += static_cast<double>(rt);
    real1 += static_cast<double>(b.real_counts[1]);
    synth1 += static_cast<double>(b.synthetic_counts[1]);
  }
  CHECK(synth1 == 0.0);  // phat puts no mass on category 1
  real_total /= reps;
  real1 /= reps;
  CHECK(std::abs(real_total - 30.0) < 4.0 * std::sqrt(100.0 * 0.3 * 0.7 / reps));
  CHECK(std::abs(real1 - 15.0) < 4.0 * std::sqrt(100.0 * 0.15 * 0.85 / reps));
}

TEST_CASE("identical seeds reproduce identical batches") {
  const Simplex p({0.25, 0.25, 0.5});
  const Simplex phat = Simplex::uniform(3);
  Rng a(RngSeed{101, 5});
  Rng b(RngSeed{101, 5});
  const Batch x = draw_batch(p, phat, 0.5, 1000, a);
  const Batch y = draw_batch(p, phat, 0.5, 1000, b);
  CHECK(x.counts == y.counts);
}
