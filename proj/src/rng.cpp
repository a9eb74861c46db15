#include "normscape/rng.hpp"

#include <cmath>
#include <numbers>

namespace normscape {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> stream) noexcept {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (const std::uint64_t s : stream) {
    state ^= s + 0x632be59bd9b4e019ULL + (out << 6) + (out >> 2);
    out = splitmix64(state);
  }
  return out;
}

Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> stream) {
  return Rng(derive_seed(master, stream));
}

double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(Rng& rng, double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(rng); }

std::size_t uniform_index(Rng& rng, std::size_t n) noexcept {
  const unsigned __int128 product = static_cast<unsigned __int128>(rng()) * n;
  return static_cast<std::size_t>(product >> 64);
}

double standard_normal(Rng& rng) noexcept {
  // Box-Muller; u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double lognormal(Rng& rng, double mu, double sigma) noexcept {
  return std::exp(mu + sigma * standard_normal(rng));
}

bool bernoulli(Rng& rng, double p) noexcept { return uniform01(rng) < p; }

std::size_t sample_discrete(std::span<const double> weights, Rng& rng) noexcept {
  double total = 0.0;
  for (const double w : weights) total += w;
  double target = uniform01(rng) * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (target < weights[k]) return k;
    target -= weights[k];
  }
  // Rounding left a sliver; return the last index with positive weight.
  for (std::size_t k = weights.size(); k > 0; --k)
    if (weights[k - 1] > 0.0) return k - 1;
  return 0;
}

}  // namespace normscape
