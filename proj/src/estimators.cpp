#include "selfconsume/estimators.hpp"

#include <stdexcept>
#include <string>

namespace selfconsume {

Simplex empirical(const Batch& b) {
  if (b.n < 1) throw std::invalid_argument("empirical estimate needs n >= 1");
  std::vector<double> w(b.counts.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = static_cast<double>(b.counts[j]) / static_cast<double>(b.n);
  }
  return Simplex(std::move(w));
}

Simplex pooled_empirical(const std::vector<Batch>& batches) {
  if (batches.empty()) throw std::invalid_argument("pooled estimate needs batches");
  const std::size_t k = batches.front().counts.size();
  std::vector<std::int64_t> total(k, 0);
  std::int64_t n = 0;
  for (const Batch& b : batches) {
    if (b.counts.size() != k) throw std::invalid_argument("pooled batch dimension mismatch");
    for (std::size_t j = 0; j < k; ++j) total[j] += b.counts[j];
    n += b.n;
  }
  return empirical(Batch{std::move(total), n});
}

std::vector<double> debias(const Simplex& emp, const Simplex& phat_prev, double alpha) {
  if (emp.k() != phat_prev.k()) throw std::invalid_argument("debias dimension mismatch");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("debias needs alpha in (0,1], got " + std::to_string(alpha));
  }
  std::vector<double> out(emp.k());
  for (std::size_t j = 0; j < emp.k(); ++j) {
    out[j] = (emp[j] - (1.0 - alpha) * phat_prev[j]) / alpha;
  }
  return out;
}

CombinerState combiner_init(const Batch& b0) {
  CombinerState st;
  st.estimate = empirical(b0).weights();
  st.eta = 1.0 / static_cast<double>(b0.n);
  st.valid = true;
  return st;
}

CombinerState combiner_step(const CombinerState& st, const Batch& b, double alpha) {
  if (b.counts.size() != st.estimate.size()) {
    throw std::invalid_argument("combiner batch dimension mismatch");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("combiner step needs alpha in [0,1]");
  }
  if (alpha == 0.0) return st;  // batch carries no real signal; n*alpha^2 = 0

  const double n = static_cast<double>(b.n);
  const double inv_eta = 1.0 / st.eta;
  CombinerState next;
  next.valid = st.valid && (alpha - alpha * alpha <= 1.0 / (st.eta * n));
  const double w = n * alpha / (inv_eta + n * alpha * alpha);
  const Simplex emp = empirical(b);
  next.estimate.resize(st.estimate.size());
  for (std::size_t j = 0; j < st.estimate.size(); ++j) {
    next.estimate[j] = (1.0 - w) * st.estimate[j] + w * emp[j];
  }
  next.eta = 1.0 / (inv_eta + n * alpha * alpha);
  return next;
}

Simplex oracle_estimate(const std::vector<std::int64_t>& real_counts) {
  std::int64_t n = 0;
  for (std::int64_t c : real_counts) {
    if (c < 0) throw std::invalid_argument("negative real count");
    n += c;
  }
  if (n == 0) return Simplex::uniform(real_counts.size());
  return empirical(Batch{real_counts, n});
}

}  // namespace selfconsume
