#include "selfconsume/simplex.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace selfconsume {

Simplex::Simplex(std::vector<double> w) : w_(std::move(w)) {
  if (w_.size() < 2) {
    throw std::invalid_argument("simplex needs at least 2 components, got " +
                                std::to_string(w_.size()));
  }
  double sum = 0.0;
  for (double x : w_) {
    if (!(x >= 0.0)) {  // also rejects NaN
      throw std::invalid_argument("simplex component negative or NaN: " +
                                  std::to_string(x));
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexSumTol) {
    throw std::invalid_argument("simplex sum " + std::to_string(sum) +
                                " outside 1 +/- 1e-9");
  }
}

Simplex Simplex::uniform(std::size_t k) {
  return Simplex(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Simplex clamp_to_simplex(const std::vector<double>& w) {
  std::vector<double> clipped(w.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    clipped[j] = w[j] > 0.0 ? w[j] : 0.0;
    sum += clipped[j];
  }
  if (!(sum > 0.0)) {
    throw std::invalid_argument("cannot project vector with no positive mass");
  }
  for (double& x : clipped) x /= sum;
  return Simplex(std::move(clipped));
}

static void check_dims(const Simplex& p, const Simplex& q) {
  if (p.k() != q.k()) {
    throw std::invalid_argument("loss dimension mismatch: " + std::to_string(p.k()) +
                                " vs " + std::to_string(q.k()));
  }
}

double loss_l2sq(const Simplex& p, const Simplex& q) {
  check_dims(p, q);
  double acc = 0.0;
  for (std::size_t j = 0; j < p.k(); ++j) {
    const double d = p[j] - q[j];
    acc += d * d;
  }
  return acc;
}

double loss_l1(const Simplex& p, const Simplex& q) {
  check_dims(p, q);
  double acc = 0.0;
  for (std::size_t j = 0; j < p.k(); ++j) acc += std::abs(p[j] - q[j]);
  return acc;
}

double loss(const Simplex& p, const Simplex& q, LossKind kind) {
  return kind == LossKind::L2Squared ? loss_l2sq(p, q) : loss_l1(p, q);
}

}  // namespace selfconsume
