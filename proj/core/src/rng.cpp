#include "typosearch/rng.hpp"

#include <stdexcept>

#include "typosearch/digest.hpp"

namespace typosearch {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return splitmix64(splitmix64(seed) ^ salt);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept {
  return derive_seed(seed, Fnv1a64{}.update(key).value());
}

double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t range = n;
  const std::uint64_t limit = Rng::max() - Rng::max() % range;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit && limit != 0);
  return static_cast<std::size_t>(x % range);
}

std::size_t sample_categorical(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) {
      throw std::invalid_argument("sample_categorical: negative weight");
    }
    if (weights[i] > 0.0) last_positive = i;
    total += weights[i];
  }
  if (last_positive == weights.size()) {
    throw std::invalid_argument("sample_categorical: no positive weight");
  }
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace typosearch
