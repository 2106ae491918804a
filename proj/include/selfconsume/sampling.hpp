#pragma once

#include <cstdint>
#include <vector>

#include "selfconsume/rng.hpp"
#include "selfconsume/simplex.hpp"

namespace selfconsume {

// Count histogram of one stage's draws; sum(counts) == n always.
struct Batch {
  std::vector<std::int64_t> counts;
  std::int64_t n = 0;
};

// Stage histogram split by sample source.  real + synthetic sums to n;
// only an oracle consumer may look at the split.
struct OracleBatch {
  std::vector<std::int64_t> real_counts;
  std::vector<std::int64_t> synthetic_counts;
  std::int64_t n = 0;
};

// Exact Binomial(n, p) draw by CDF inversion.  Small n*min(p,1-p) walks the
// pmf from zero; large cases enumerate outcomes outward from the mode, which
// keeps the expected walk length at a few standard deviations.
std::int64_t binomial_draw(std::int64_t n, double p, Rng& rng);

// Exact multinomial draw via sequential conditional binomials over the
// (possibly unnormalized, nonnegative) weight vector.
std::vector<std::int64_t> multinomial_draw(std::int64_t n, const std::vector<double>& w,
                                           Rng& rng);

// Draws n samples from alpha * p + (1-alpha) * phat_prev as one multinomial
// over the mixture weights.  Requires matching dimensions, alpha in [0,1],
// n >= 0.
Batch draw_batch(const Simplex& p, const Simplex& phat_prev, double alpha, std::int64_t n,
                 Rng& rng);

// Same mixture, but the real/synthetic split is resolved first:
// Z ~ Binomial(n, alpha) samples from p, the remaining n - Z from phat_prev.
// Marginally identical to draw_batch's mixture law.
OracleBatch draw_oracle_batch(const Simplex& p, const Simplex& phat_prev, double alpha,
                              std::int64_t n, Rng& rng);

}  // namespace selfconsume
