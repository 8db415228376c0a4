#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mixlab {

using Rng = std::mt19937_64;

// Derives an independent seed for a named consumer. Adding a new stream name
// never perturbs the values drawn by existing ones.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);

Rng make_stream(std::uint64_t root, std::string_view stream);

// Portable draws: mt19937_64 output is fixed by the standard but the library
// distributions are not, so these are implemented directly.
double uniform01(Rng& rng);
double uniform_real(Rng& rng, double lo, double hi);
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

}  // namespace mixlab
