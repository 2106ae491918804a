#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "selfconsume/schedule.hpp"
#include "selfconsume/simplex.hpp"

using namespace selfconsume;

TEST_CASE("simplex accepts valid weights and rejects everything else") {
  const Simplex p({0.3, 0.7});
  CHECK(p.k() == 2);
  CHECK(p[0] == doctest::Approx(0.3));

  CHECK_THROWS_AS(Simplex({1.0}), std::invalid_argument);            // k < 2
  CHECK_THROWS_AS(Simplex({-0.1, 1.1}), std::invalid_argument);      // negative entry
  CHECK_THROWS_AS(Simplex({0.3, 0.6}), std::invalid_argument);       // sum far from 1
  CHECK_THROWS_AS(Simplex({0.5, 0.5 + 1e-7}), std::invalid_argument);
  CHECK_NOTHROW(Simplex({0.5, 0.5 + 1e-10}));  // within the sum tolerance

  const Simplex u = Simplex::uniform(4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(u[j] == doctest::Approx(0.25));
}

TEST_CASE("losses on hand-computed pairs") {
  const Simplex p({0.3, 0.7});
  const Simplex q({0.5, 0.5});
  CHECK(loss_l2sq(p, q) == doctest::Approx(0.08));
  CHECK(loss_l1(p, q) == doctest::Approx(0.4));
  CHECK(loss(p, q, LossKind::L2Squared) == doctest::Approx(0.08));
  CHECK(loss(p, q, LossKind::L1) == doctest::Approx(0.4));

  const Simplex e0({1.0, 0.0});
  const Simplex e1({0.0, 1.0});
  CHECK(loss_l2sq(e0, e1) == doctest::Approx(2.0));
  CHECK(loss_l1(e0, e1) == doctest::Approx(2.0));
  CHECK(loss_l2sq(p, p) == doctest::Approx(0.0));
}

TEST_CASE("clamping clips negatives and renormalizes") {
  const Simplex s = clamp_to_simplex({-0.1, 0.6, 0.7});
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(0.6 / 1.3));
  CHECK(s[2] == doctest::Approx(0.7 / 1.3));
  CHECK_THROWS_AS(clamp_to_simplex({-1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(Schedule({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule({5}, {0.5}), std::invalid_argument);       // alpha_0 must be 1
  CHECK_THROWS_AS(Schedule({5, 0}, {1.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule({5, 5}, {1.0, 1.5}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule({5, 5}, {1.0}), std::invalid_argument);

  const Schedule s({5, 3}, {1.0, 0.5});
  CHECK(s.horizon() == 1);
  CHECK(s.stages() == 2);
  CHECK(s.n(1) == 3);
  CHECK(s.alpha(1) == doctest::Approx(0.5));
}

TEST_CASE("polynomial schedule values") {
  const Schedule s = schedule_poly({1.0, 1.0, 0.5, 3});
  // n_i = ceil((i+1)^1.5): 1, 2.828.. -> 3, 5.196.. -> 6, 8
  CHECK(s.n(0) == 1);
  CHECK(s.n(1) == 3);
  CHECK(s.n(2) == 6);
  CHECK(s.n(3) == 8);
  CHECK(s.alpha(0) == doctest::Approx(1.0));
  CHECK(s.alpha(1) == doctest::Approx(0.7071067811865475));
  CHECK(s.alpha(3) == doctest::Approx(0.5));
}

TEST_CASE("polynomial schedule does not round exact integers up") {
  // a (i+1)^1 lands exactly on integers; floating error must not add 1.
  const Schedule s = schedule_poly({2.0, 1.0, 0.0, 199});
  for (std::size_t i = 0; i <= 199; ++i) {
    CHECK(s.n(i) == static_cast<std::int64_t>(2 * (i + 1)));
    CHECK(s.alpha(i) == doctest::Approx(1.0));
  }
}

TEST_CASE("constant schedule keeps stage zero fully real") {
  const Schedule s = schedule_constant(100, 0.3, 2);
  CHECK(s.stages() == 3);
  CHECK(s.n(2) == 100);
  CHECK(s.alpha(0) == doctest::Approx(1.0));
  CHECK(s.alpha(1) == doctest::Approx(0.3));
}

TEST_CASE("effective sample sums accumulate n alpha and n alpha^2") {
  const Schedule s = schedule_constant(100, 0.3, 2);
  const EffectiveSums e0 = effective_sums(s, 0);
  CHECK(e0.sum_na == doctest::Approx(100.0));
  CHECK(e0.sum_na2 == doctest::Approx(100.0));
  const EffectiveSums e2 = effective_sums(s, 2);
  CHECK(e2.sum_na == doctest::Approx(160.0));
  CHECK(e2.sum_na2 == doctest::Approx(118.0));
  CHECK_THROWS_AS(effective_sums(s, 3), std::out_of_range);
}
