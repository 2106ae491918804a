#include "selfconsume/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace selfconsume {

namespace {

// Inverse-CDF walk from zero; expected length n*q + a few standard
// deviations.  Requires q in (0,1) and a pmf(0) that does not underflow.
std::int64_t binomial_small(std::int64_t n, double q, double u) {
  const double ratio = q / (1.0 - q);
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-q));
  double cum = pmf;
  std::int64_t x = 0;
  while (cum < u && x < n) {
    pmf *= static_cast<double>(n - x) / static_cast<double>(x + 1) * ratio;
    ++x;
    cum += pmf;
  }
  return x;
}

// Inverse-CDF with the outcomes enumerated outward from the mode
// (m, m+1, m-1, m+2, ...).  Any fixed enumeration paired with a single
// uniform gives an exact draw; this ordering keeps the expected walk length
// near sqrt(n q (1-q)).
std::int64_t binomial_mode(std::int64_t n, double q, double u) {
  const double nd = static_cast<double>(n);
  std::int64_t m = static_cast<std::int64_t>((nd + 1.0) * q);
  if (m > n) m = n;
  const double log_pm = std::lgamma(nd + 1.0) - std::lgamma(static_cast<double>(m) + 1.0) -
                        std::lgamma(nd - static_cast<double>(m) + 1.0) +
                        static_cast<double>(m) * std::log(q) +
                        (nd - static_cast<double>(m)) * std::log1p(-q);
  const double ratio = q / (1.0 - q);
  double cum = std::exp(log_pm);
  if (cum >= u) return m;
  std::int64_t hi = m, lo = m;
  double pmf_hi = cum, pmf_lo = cum;
  while (hi < n || lo > 0) {
    if (hi < n) {
      pmf_hi *= static_cast<double>(n - hi) / static_cast<double>(hi + 1) * ratio;
      ++hi;
      cum += pmf_hi;
      if (cum >= u) return hi;
    }
    if (lo > 0) {
      pmf_lo *= static_cast<double>(lo) / (static_cast<double>(n - lo + 1) * ratio);
      --lo;
      cum += pmf_lo;
      if (cum >= u) return lo;
    }
  }
  return m;  // floating-point residue in the far tail; keep it deterministic
}

}  // namespace

std::int64_t binomial_draw(std::int64_t n, double p, Rng& rng) {
  if (n < 0) throw std::invalid_argument("binomial draw needs n >= 0");
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) {
    throw std::invalid_argument("binomial probability outside [0,1]: " + std::to_string(p));
  }
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const bool flipped = p > 0.5;
  const double q = flipped ? 1.0 - p : p;
  const double u = rng.next_unit();
  std::int64_t x;
  if (static_cast<double>(n) * q <= 32.0 || n <= 64) {
    x = binomial_small(n, q, u);
  } else {
    x = binomial_mode(n, q, u);
  }
  return flipped ? n - x : x;
}

std::vector<std::int64_t> multinomial_draw(std::int64_t n, const std::vector<double>& w,
                                           Rng& rng) {
  if (n < 0) throw std::invalid_argument("multinomial draw needs n >= 0");
  if (w.empty()) throw std::invalid_argument("multinomial weights are empty");
  double mass = 0.0;
  for (double x : w) {
    if (!(x >= -1e-12)) {
      throw std::invalid_argument("multinomial weight negative: " + std::to_string(x));
    }
    mass += x > 0.0 ? x : 0.0;
  }
  if (!(mass > 0.0)) throw std::invalid_argument("multinomial weights sum to zero");

  const std::size_t k = w.size();
  std::vector<std::int64_t> counts(k, 0);
  std::int64_t remaining = n;
  for (std::size_t j = 0; j + 1 < k && remaining > 0; ++j) {
    const double wj = w[j] > 0.0 ? w[j] : 0.0;
    double r;
    if (mass > 0.0) {
      r = wj / mass;
      if (r > 1.0) r = 1.0;
    } else {
      r = wj > 0.0 ? 1.0 : 0.0;
    }
    counts[j] = binomial_draw(remaining, r, rng);
    remaining -= counts[j];
    mass -= wj;
  }
  counts[k - 1] += remaining;
  return counts;
}

Batch draw_batch(const Simplex& p, const Simplex& phat_prev, double alpha, std::int64_t n,
                 Rng& rng) {
  if (p.k() != phat_prev.k()) throw std::invalid_argument("mixture dimension mismatch");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("sampling probability outside [0,1]");
  }
  std::vector<double> mix(p.k());
  for (std::size_t j = 0; j < p.k(); ++j) {
    mix[j] = alpha * p[j] + (1.0 - alpha) * phat_prev[j];
  }
  return Batch{multinomial_draw(n, mix, rng), n};
}

OracleBatch draw_oracle_batch(const Simplex& p, const Simplex& phat_prev, double alpha,
                              std::int64_t n, Rng& rng) {
  if (p.k() != phat_prev.k()) throw std::invalid_argument("mixture dimension mismatch");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("sampling probability outside [0,1]");
  }
  const std::int64_t z = binomial_draw(n, alpha, rng);
  OracleBatch b;
  b.real_counts = multinomial_draw(z, p.weights(), rng);
  b.synthetic_counts = multinomial_draw(n - z, phat_prev.weights(), rng);
  b.n = n;
  return b;
}

}  // namespace selfconsume
