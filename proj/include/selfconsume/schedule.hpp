#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace selfconsume {

// Stage plan for a recursive sampling run: batch sizes n_0..n_T and
// real-data sampling probabilities alpha_0..alpha_T.  Stage t >= 1 draws
// from the mixture alpha_t * p + (1 - alpha_t) * phat_{t-1}; stage 0 is
// always fully real, hence the pinned alpha_0 = 1.
class Schedule {
 public:
  // Throws std::invalid_argument unless the vectors are equal-length and
  // nonempty, every n_t >= 1, every alpha_t is in [0,1], and alpha_0 == 1.
  Schedule(std::vector<std::int64_t> batch_sizes, std::vector<double> sampling_probs);

  // Last stage index T (stage count is horizon()+1).
  std::size_t horizon() const { return n_.size() - 1; }
  std::size_t stages() const { return n_.size(); }

  std::int64_t n(std::size_t t) const { return n_[t]; }
  double alpha(std::size_t t) const { return alpha_[t]; }

  const std::vector<std::int64_t>& batch_sizes() const { return n_; }
  const std::vector<double>& sampling_probs() const { return alpha_; }

 private:
  std::vector<std::int64_t> n_;
  std::vector<double> alpha_;
};

// Polynomial family: n_i = ceil(a * (i+1)^(beta+gamma)), alpha_0 = 1,
// alpha_i = (i+1)^(-gamma) for i >= 1.
struct PolyScheduleParams {
  double a = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t horizon = 0;
};

// Throws std::invalid_argument unless a > 0, beta >= 0, gamma >= 0.
Schedule schedule_poly(const PolyScheduleParams& params);

// Constant family: n_t = n for all t, alpha_0 = 1, alpha_t = alpha for t >= 1.
Schedule schedule_constant(std::int64_t n, double alpha, std::size_t horizon);

struct EffectiveSums {
  double sum_na = 0.0;   // sum_{i<=t} n_i * alpha_i
  double sum_na2 = 0.0;  // sum_{i<=t} n_i * alpha_i^2
};

// Prefix sums through stage t; throws std::out_of_range if t > horizon.
// Both sums are nondecreasing in t and sum_na2 <= sum_na.
EffectiveSums effective_sums(const Schedule& s, std::size_t t);

}  // namespace selfconsume
