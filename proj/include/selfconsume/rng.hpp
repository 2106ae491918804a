#pragma once

#include <cstdint>
#include <random>

namespace selfconsume {

// Stage index occupies the low 16 bits of a stream id, so trial i at stage t
// uses stream_id = i * kStreamsPerTrial + t.  Every (trial, stage) pair gets
// its own engine, which makes trajectories reproducible independently of
// execution order and worker count.
inline constexpr std::uint64_t kStreamsPerTrial = std::uint64_t{1} << 16;

struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

// splitmix64 finalizer; decorrelates nearby (master, stream) pairs.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

// Deterministic generator.  All distribution sampling in this project is
// built on next_u64/next_unit only; std::*_distribution is avoided because
// its output is implementation-defined.
class Rng {
 public:
  explicit Rng(RngSeed seed) : eng_(mix_seed(seed.master_seed, seed.stream_id)) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform double in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace selfconsume
