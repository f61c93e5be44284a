#pragma once

#include <cstdint>
#include <random>

namespace recon::detail {

// Independent generator per (seed, stream) pair so that sub-tasks never share
// a random sequence.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

enum Stream : std::uint64_t {
  kRandomizedPrediction = 1,
  kRandomSelect,
  kSequentialOrder,
  kSequentialPick,
  kSweepReplace,
  kSweepPredictor,
  kReconciledSetSample,
  kCorruption,
  kGroundTruth,
  kPairAttempt,
  kRandomPredictor,
  kModelClass,
  kCausal,
  kEstimators,
  kSplit,
};

}  // namespace recon::detail
