#include "selfconsume/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace selfconsume {

Schedule::Schedule(std::vector<std::int64_t> batch_sizes, std::vector<double> sampling_probs)
    : n_(std::move(batch_sizes)), alpha_(std::move(sampling_probs)) {
  if (n_.empty() || n_.size() != alpha_.size()) {
    throw std::invalid_argument("schedule vectors must be nonempty and equal length");
  }
  for (std::int64_t n : n_) {
    if (n < 1) throw std::invalid_argument("batch size must be >= 1, got " + std::to_string(n));
  }
  for (double a : alpha_) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("sampling probability outside [0,1]: " + std::to_string(a));
    }
  }
  if (alpha_[0] != 1.0) {
    throw std::invalid_argument("stage 0 is fully real: alpha_0 must be 1");
  }
}

// ceil with a snap-to-integer guard so pow() noise cannot bump an exact
// integer up by one.
static std::int64_t ceil_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) x = r;
  return static_cast<std::int64_t>(std::ceil(x));
}

Schedule schedule_poly(const PolyScheduleParams& params) {
  if (!(params.a > 0.0) || !(params.beta >= 0.0) || !(params.gamma >= 0.0)) {
    throw std::invalid_argument("polynomial schedule needs a > 0, beta >= 0, gamma >= 0");
  }
  const std::size_t stages = params.horizon + 1;
  std::vector<std::int64_t> n(stages);
  std::vector<double> alpha(stages);
  for (std::size_t i = 0; i < stages; ++i) {
    const double base = static_cast<double>(i + 1);
    n[i] = ceil_count(params.a * std::pow(base, params.beta + params.gamma));
    alpha[i] = i == 0 ? 1.0 : std::pow(base, -params.gamma);
  }
  return Schedule(std::move(n), std::move(alpha));
}

Schedule schedule_constant(std::int64_t n, double alpha, std::size_t horizon) {
  std::vector<std::int64_t> ns(horizon + 1, n);
  std::vector<double> alphas(horizon + 1, alpha);
  alphas[0] = 1.0;
  return Schedule(std::move(ns), std::move(alphas));
}

EffectiveSums effective_sums(const Schedule& s, std::size_t t) {
  if (t > s.horizon()) {
    throw std::out_of_range("stage " + std::to_string(t) + " past horizon " +
                            std::to_string(s.horizon()));
  }
  EffectiveSums sums;
  for (std::size_t i = 0; i <= t; ++i) {
    const double na = static_cast<double>(s.n(i)) * s.alpha(i);
    sums.sum_na += na;
    sums.sum_na2 += na * s.alpha(i);
  }
  return sums;
}

}  // namespace selfconsume
