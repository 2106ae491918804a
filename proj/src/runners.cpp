#include "selfconsume/runners.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace selfconsume {

namespace {

void record(Trajectory& traj, const Simplex& p, Simplex estimate, const Batch* batch,
            const RunOptions& opts) {
  traj.loss_l2.push_back(loss_l2sq(p, estimate));
  traj.loss_l1.push_back(loss_l1(p, estimate));
  traj.estimates.push_back(std::move(estimate));
  if (opts.record_batches && batch != nullptr) traj.batches.push_back(*batch);
}

Rng stage_rng(RngSeed seed, std::size_t stage) {
  return Rng(RngSeed{seed.master_seed, seed.stream_id + stage});
}

}  // namespace

Trajectory run_accumulation(const Simplex& p, const Schedule& s, EstimatorKind estimator,
                            RngSeed seed, const RunOptions& opts) {
  if (estimator != EstimatorKind::PerBatchEmpirical &&
      estimator != EstimatorKind::PooledEmpirical &&
      estimator != EstimatorKind::OrderOptimalCombiner) {
    throw std::invalid_argument("estimator kind cannot accumulate this workflow's history");
  }
  Trajectory traj;
  std::vector<Batch> history;
  CombinerState combiner;
  for (std::size_t t = 0; t <= s.horizon(); ++t) {
    Rng rng = stage_rng(seed, t);
    const Simplex& ref = t == 0 ? p : traj.estimates.back();
    Batch b = draw_batch(p, ref, s.alpha(t), s.n(t), rng);

    Simplex est = [&]() -> Simplex {
      switch (estimator) {
        case EstimatorKind::PerBatchEmpirical:
          return empirical(b);
        case EstimatorKind::PooledEmpirical:
          history.push_back(b);
          return pooled_empirical(history);
        default: {  // OrderOptimalCombiner
          combiner = t == 0 ? combiner_init(b) : combiner_step(combiner, b, s.alpha(t));
          if (combiner.valid) return Simplex(combiner.estimate);
          if (!opts.clamp_invalid) {
            throw std::runtime_error(
                "combiner weight left [0,1] at stage " + std::to_string(t) +
                "; schedule violates the admissibility condition");
          }
          Simplex clamped = clamp_to_simplex(combiner.estimate);
          combiner.estimate = clamped.weights();  // deployed estimate drives the recursion
          return clamped;
        }
      }
    }();
    record(traj, p, std::move(est), &b, opts);
  }
  return traj;
}

Trajectory run_replacement(const Simplex& p, std::int64_t n, double alpha,
                           std::size_t horizon, EstimatorKind estimator, RngSeed seed,
                           const RunOptions& opts) {
  if (estimator != EstimatorKind::PerBatchEmpirical &&
      estimator != EstimatorKind::PerBatchDebiased) {
    throw std::invalid_argument("replacement workflow estimates from single batches");
  }
  if (estimator == EstimatorKind::PerBatchDebiased && !(alpha > 0.0)) {
    throw std::invalid_argument("debiased replacement needs alpha > 0");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("sampling probability outside [0,1]");
  }
  Trajectory traj;
  for (std::size_t t = 0; t <= horizon; ++t) {
    Rng rng = stage_rng(seed, t);
    const double a = t == 0 ? 1.0 : alpha;
    const Simplex& ref = t == 0 ? p : traj.estimates.back();
    Batch b = draw_batch(p, ref, a, n, rng);
    Simplex est = t == 0 || estimator == EstimatorKind::PerBatchEmpirical
                      ? empirical(b)
                      : clamp_to_simplex(debias(empirical(b), ref, alpha));
    record(traj, p, std::move(est), &b, opts);
  }
  return traj;
}

Trajectory run_oracle(const Simplex& p, const Schedule& s, RngSeed seed,
                      const RunOptions& opts) {
  Trajectory traj;
  std::vector<std::int64_t> real_total(p.k(), 0);
  for (std::size_t t = 0; t <= s.horizon(); ++t) {
    Rng rng = stage_rng(seed, t);
    const Simplex& ref = t == 0 ? p : traj.estimates.back();
    OracleBatch b = draw_oracle_batch(p, ref, s.alpha(t), s.n(t), rng);
    for (std::size_t j = 0; j < p.k(); ++j) real_total[j] += b.real_counts[j];

    Batch combined;
    combined.n = b.n;
    combined.counts.resize(p.k());
    for (std::size_t j = 0; j < p.k(); ++j) {
      combined.counts[j] = b.real_counts[j] + b.synthetic_counts[j];
    }
    record(traj, p, oracle_estimate(real_total), &combined, opts);
  }
  return traj;
}

}  // namespace selfconsume
