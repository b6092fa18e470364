#include "fedclave/random.hpp"

#include <limits>

namespace fedclave {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, Stream stream,
                          std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(stream)));
  for (const auto tag : tags) {
    h = splitmix64(h ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
  }
  return h;
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return draw % n;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace fedclave
