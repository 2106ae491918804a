#pragma once

#include <cstdint>
#include <vector>

#include "selfconsume/sampling.hpp"
#include "selfconsume/simplex.hpp"

namespace selfconsume {

enum class EstimatorKind {
  PerBatchEmpirical,     // latest batch's empirical frequencies
  PooledEmpirical,       // empirical over all counts seen so far
  OrderOptimalCombiner,  // recursive debias-and-reweight update
  PerBatchDebiased,      // per-stage debiased empirical, clamped; exploratory
  OracleEmpirical,       // empirical over cumulative real-source counts only
};

// counts / n as a Simplex; requires n >= 1.
Simplex empirical(const Batch& b);

// Empirical over the summed counts of all batches; requires a nonempty list
// with consistent dimensions.
Simplex pooled_empirical(const std::vector<Batch>& batches);

// Conditionally unbiased single-stage correction: given a batch drawn from
// alpha * p + (1-alpha) * phat_prev,
//   (emp - (1-alpha) * phat_prev) / alpha
// has conditional mean p.  The output is affine, sums to one, and may leave
// the simplex; it is returned raw.  Requires alpha in (0,1].
std::vector<double> debias(const Simplex& emp, const Simplex& phat_prev, double alpha);

// Recursive estimator state.  eta tracks the variance factor: after stage t,
// eta = 1 / sum_{i<=t} n_i alpha_i^2 and each component's variance is at most
// eta * p[j](1-p[j]).  When valid is true the estimate vector satisfies the
// Simplex invariants (it is then a convex combination of simplex points);
// once a step's weight leaves [0,1] the flag latches false and the raw
// vector may have negative entries.
struct CombinerState {
  std::vector<double> estimate;
  double eta = 0.0;
  bool valid = true;
};

// State after the fully-real stage 0: empirical estimate, eta = 1/n_0.
CombinerState combiner_init(const Batch& b0);

// One update with a batch drawn at sampling probability alpha:
//   w   = n*alpha / (1/eta + n*alpha^2)
//   est <- (1-w) * est + w * empirical(b)
//   eta <- 1 / (1/eta + n*alpha^2)
// The convex-combination condition alpha - alpha^2 <= 1/(eta*n) is evaluated
// against the incoming eta; failure clears valid but the update still runs
// (experiments probe behavior past the condition).  alpha = 0 leaves the
// state unchanged.
CombinerState combiner_step(const CombinerState& st, const Batch& b, double alpha);

// Empirical distribution of the cumulative real-source counts; uniform over
// k categories when no real sample has arrived yet.
Simplex oracle_estimate(const std::vector<std::int64_t>& real_counts);

}  // namespace selfconsume
