#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace fedclave {

// mt19937_64's output sequence is fixed by the standard; the helpers below
// avoid the implementation-defined std distributions so that seeded runs are
// identical across standard libraries.
using Rng = std::mt19937_64;

// Named substreams. Every random decision in a run draws from a generator
// seeded by derive_seed(run_seed, stream, ...), never from shared state, so
// results do not depend on scheduling.
enum class Stream : std::uint64_t {
  kModelInit = 1,
  kClientTrain = 2,
  kPartition = 3,
  kClientTransform = 4,
  kTestPool = 5,
  kKMeans = 6,
  kIfcaAssign = 7,
  kSynthetic = 8,
  kOracle = 9,
  kRepeat = 10,
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t base, Stream stream,
                          std::initializer_list<std::uint64_t> tags = {});

// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 bits of randomness.
double uniform_unit(Rng& rng);

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace fedclave
