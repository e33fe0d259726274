#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "ris/numerics.hpp"

namespace ris {

using Rng = std::mt19937_64;

// Stream tags used when splitting a base seed. Training, evaluation and phase
// initialisation draws never share a stream.
enum class Stream : std::uint64_t {
  kTrainChannel = 1,
  kEvalChannel = 2,
  kTrainPhase = 3,
  kEvalPhase = 4,
  kFixedCoupling = 5,
  kTrial = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from `base` and a path of indices. Every index is
/// folded through splitmix64, so (base, a, b) and (base, b, a) differ.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

inline std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index) {
  return derive_seed(base, {static_cast<std::uint64_t>(stream), index});
}

/// Circularly-symmetric complex Gaussian with unit variance.
cdouble complex_normal(Rng& rng);

double uniform(Rng& rng, double lo, double hi);

}  // namespace ris
