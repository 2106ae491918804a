#pragma once

#include <cstdint>
#include <vector>

#include "selfconsume/estimators.hpp"
#include "selfconsume/rng.hpp"
#include "selfconsume/sampling.hpp"
#include "selfconsume/schedule.hpp"
#include "selfconsume/simplex.hpp"

namespace selfconsume {

enum class Workflow {
  Accumulation,  // estimates built from the full history
  Replacement,   // each stage's estimate from that stage's batch alone
  Oracle,        // estimates from cumulative real-source samples only
};

struct RunOptions {
  bool record_batches = false;
  // Accumulation + combiner only: when the validity condition fails, clip
  // negatives and renormalize instead of throwing.  Exploratory; defaults
  // off and is never enabled by the acceptance checks.
  bool clamp_invalid = false;
};

// One realized run.  estimates[t] is the deployed estimate after stage t and
// is always a valid Simplex; losses are measured against the true p.
// The runner consumes streams seed.stream_id + t for stage t, so callers
// pass stream_id = trial_index * kStreamsPerTrial.
struct Trajectory {
  std::vector<Simplex> estimates;
  std::vector<double> loss_l2;
  std::vector<double> loss_l1;
  std::vector<Batch> batches;  // filled only when record_batches is set
};

// Self-consuming run where the estimator keeps its whole history.  Supports
// PerBatchEmpirical, PooledEmpirical and OrderOptimalCombiner; throws
// std::invalid_argument for other kinds, and std::runtime_error if the
// combiner leaves the simplex with clamp_invalid off (the next stage could
// not sample from it).
Trajectory run_accumulation(const Simplex& p, const Schedule& s, EstimatorKind estimator,
                            RngSeed seed, const RunOptions& opts = {});

// Memoryless variant on a constant plan: stage t >= 1 draws n samples at
// probability alpha from the mixture with the previous stage's estimate and
// estimates from that batch alone.  Supports PerBatchEmpirical and
// PerBatchDebiased (the latter needs alpha > 0).
Trajectory run_replacement(const Simplex& p, std::int64_t n, double alpha,
                           std::size_t horizon, EstimatorKind estimator, RngSeed seed,
                           const RunOptions& opts = {});

// Mirrors the accumulation sampling process but estimates from the real
// samples only (source identities resolved per draw_oracle_batch).
Trajectory run_oracle(const Simplex& p, const Schedule& s, RngSeed seed,
                      const RunOptions& opts = {});

}  // namespace selfconsume
