#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "selfconsume/rng.hpp"
#include "selfconsume/schedule.hpp"
#include "selfconsume/simplex.hpp"

// Closed-form minimax bounds for stage-t estimation, in terms of the
// effective sums S1 = sum_{i<=t} n_i alpha_i and S2 = sum_{i<=t} n_i alpha_i^2
// and the history error term h_t:
//
//   lower (squared-l2):  (1/512) / (S2 + h_t)        valid when S2 + h_t >= k/4
//   lower (l1):          sqrt( (k/4096) / (S2+h_t) )  same applicability
//   upper (squared-l2):  (1 - 1/k) / S2               needs n_i a_i <= sum_{j<=i} n_j a_j^2
//   upper (l1):          sqrt( (k-1) / S2 )           same hypothesis
//   oracle:              (1/512)/S1  <=  risk  <=  2/S1   (lower needs S1 >= k/4)
//
//   h_t = sum_{i=1..t} n_i alpha_i g_i,  g_0 = 0,
//   g_i <= min(1, 16 k^2 * r_{i-1})  by Chebyshev, where r_{i-1} upper-bounds
//   the worst-case squared-l2 loss of the stage-(i-1) estimate.

namespace selfconsume {

// Chebyshev tail bound used inside h_t; capped at one because it bounds a
// probability.
double chebyshev_g(double loss_bound, std::size_t k);

// h_t for a schedule given per-stage loss bounds (stage_loss_bounds[i] bounds
// stage i's worst-case squared-l2 loss; indices 0..t-1 are read).
double error_term_h(const Schedule& s, const std::vector<double>& stage_loss_bounds,
                    std::size_t t, std::size_t k);

// Minimax lower bound; empty when S2 + h < k/4 (the reduction that produces
// the bound needs that much effective mass).
std::optional<double> lower_bound(double sum_na2, double h, std::size_t k, LossKind kind);

// Risk of the recursive combiner under its weight-validity hypothesis.
// Requires sum_na2 > 0.
double upper_bound(double sum_na2, std::size_t k, LossKind kind);

// True when n_i alpha_i <= sum_{j<=i} n_j alpha_j^2 for every i <= t, i.e.
// every combiner step through stage t keeps its weight in [0,1].
bool combiner_admissible(const Schedule& s, std::size_t t);

// Squared-l2 risk bound for the pooled empirical estimator that never
// corrects for synthetic contamination:
//   (1 - 1/k) * sum_{i<=t} n_i / (sum_{j<=i} n_j)^2.
// For a constant batch size this increases toward (1-1/k)(pi^2/6)/n.
double unprocessed_upper_bound(const Schedule& s, std::size_t t, std::size_t k);

struct OracleBounds {
  std::optional<double> lower;  // absent when sum_na < k/4
  double upper = 0.0;
};

// Two-sided envelope for an estimator that sees source identities and keeps
// only real samples; sum_na is the expected real-sample count.
OracleBounds oracle_bounds(double sum_na, std::size_t k);

// Stationary floor for the memoryless replacement workflow at per-stage
// size n and probability alpha:  1 / (512 (n alpha^2 + 16 loss_sup n alpha k^2)),
// loss_sup being (a bound on) the sup over stages of the worst-case loss.
double replacement_lower_bound(std::int64_t n, double alpha, double loss_sup,
                               std::size_t k);

using SignVector = std::vector<int>;  // entries +1/-1, length k/2

// Hard family for worst-case probing: members p_v = uniform + (delta/k)[v; -v]
// over sign vectors v in {+-1}^(k/2).  Requires even k and delta in [0,1).
struct AssouadFamily {
  std::size_t k = 0;
  double delta = 0.0;
  std::vector<SignVector> signs;
  std::vector<Simplex> members;
};

// Enumerates all 2^(k/2) members when that count fits in max_members, else
// draws a random subset of size max_members that always contains at least one
// pair differing in a single sign coordinate.  Odd k is rejected here;
// callers wanting odd k drop to k-1.
AssouadFamily assouad_family(std::size_t k, double delta, std::size_t max_members,
                             Rng& rng);

// Separation scale delta^2 = k / (64 * sum_{i<=t} n_i alpha_i (alpha_i + g_i))
// maximizing the family's resistance; empty when the sum is below k/4 (the
// regime where the scale would exceed one).  g_values[i] in [0,1], g_values[0]
// expected to be 0.
std::optional<double> assouad_delta(const Schedule& s, const std::vector<double>& g_values,
                                    std::size_t t, std::size_t k);

struct SqrtSumCheck {
  double lhs = 0.0;  // sum_{i>=1} a_i / sqrt(a_0 + ... + a_{i-1})
  double rhs = 0.0;  // d * sqrt(a_0 + ... + a_T)
  double d = 0.0;    // 1 + sqrt(1 + sup_{s>=1} a_s / (a_0 + ... + a_{s-1}))
  bool holds = false;
};

// Verifies the prefix-sum inequality lhs <= rhs for a nonnegative sequence
// with a_0 > 0 (throws otherwise).  Used by the rate analyses to control
// sums of the form sum a_i / sqrt(prefix).
SqrtSumCheck recursive_sqrt_sum_check(const std::vector<double>& seq);

// All closed-form bounds evaluated at one stage.  Optional fields are absent
// exactly when their applicability condition fails; the matching flags are
// provided for serialization.
struct BoundReport {
  std::size_t stage = 0;
  double sum_na = 0.0;
  double sum_na2 = 0.0;
  double h = 0.0;
  std::optional<double> lower_l2;
  std::optional<double> lower_l1;
  std::optional<double> upper_l2;
  std::optional<double> upper_l1;
  double unprocessed_upper_l2 = 0.0;
  std::optional<double> oracle_lower_l2;
  double oracle_upper_l2 = 0.0;
  bool applicable_lower = false;
  bool applicable_upper = false;
};

// Per-stage loss bounds used when bound_report's caller does not supply
// measured values: the recursive upper bound while the combiner stays
// admissible, the trivial cap sqrt(2) afterwards.
std::vector<double> default_stage_loss_bounds(const Schedule& s, std::size_t t,
                                              std::size_t k);

// Evaluates every bound at stage t.  stage_loss_bounds feeds h_t and defaults
// as above when empty.  Whenever lower_l2 and upper_l2 are both present,
// lower_l2 <= upper_l2.
BoundReport bound_report(const Schedule& s, std::size_t t, std::size_t k,
                         const std::vector<double>& stage_loss_bounds = {});

}  // namespace selfconsume
