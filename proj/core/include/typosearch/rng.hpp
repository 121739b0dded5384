#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace typosearch {

// mt19937_64 has a fully specified output sequence; the helpers below avoid
// the implementation-defined std:: distributions so seeded runs reproduce
// across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept;

// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng) noexcept;

// Uniform integer in [0, n); n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Index drawn with probability proportional to `weights` using exactly one
// uniform01() draw. Zero-weight entries are never returned.
std::size_t sample_categorical(Rng& rng, std::span<const double> weights);

// In-place Fisher-Yates.
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace typosearch
