#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace normscape {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Seed for a named sub-stream (replicate index, sweep job, ...) of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> stream) noexcept;

Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> stream);

// The helpers below are defined in terms of raw engine output only, so a seed produces the
// same draws with any standard library.
double uniform01(Rng& rng) noexcept;
double uniform(Rng& rng, double lo, double hi) noexcept;
std::size_t uniform_index(Rng& rng, std::size_t n) noexcept;  // n > 0
double standard_normal(Rng& rng) noexcept;
double lognormal(Rng& rng, double mu, double sigma) noexcept;
bool bernoulli(Rng& rng, double p) noexcept;

template <typename T>
void shuffle(std::span<T> items, Rng& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// Index drawn with probability proportional to weights (non-negative, positive sum).
std::size_t sample_discrete(std::span<const double> weights, Rng& rng) noexcept;

}  // namespace normscape
