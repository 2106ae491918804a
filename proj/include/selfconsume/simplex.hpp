#pragma once

#include <cstddef>
#include <vector>

namespace selfconsume {

// Absolute tolerance on the component sum accepted at construction.
inline constexpr double kSimplexSumTol = 1e-9;

// Probability vector on k >= 2 categories.  Construction validates and
// rejects; it never renormalizes.  Invariants after construction:
//   w[j] >= 0 for all j, |sum(w) - 1| <= kSimplexSumTol, k >= 2.
class Simplex {
 public:
  // Throws std::invalid_argument on a negative component, a sum outside
  // 1 +/- kSimplexSumTol, or fewer than two components.
  explicit Simplex(std::vector<double> w);

  static Simplex uniform(std::size_t k);

  std::size_t k() const { return w_.size(); }
  double operator[](std::size_t j) const { return w_[j]; }
  const std::vector<double>& weights() const { return w_; }

  bool operator==(const Simplex&) const = default;

 private:
  std::vector<double> w_;
};

enum class LossKind { L2Squared, L1 };

// Clips negative components to zero and renormalizes.  Used only for
// post-processing vectors that left the simplex (debiased estimates,
// combiner output past its validity condition); throws if the positive
// part has zero mass.
Simplex clamp_to_simplex(const std::vector<double>& w);

// Squared Euclidean distance sum_j (p[j]-q[j])^2.
double loss_l2sq(const Simplex& p, const Simplex& q);

// Total variation style distance sum_j |p[j]-q[j]|.
double loss_l1(const Simplex& p, const Simplex& q);

// Dispatch on kind; throws std::invalid_argument on dimension mismatch.
double loss(const Simplex& p, const Simplex& q, LossKind kind);

}  // namespace selfconsume
