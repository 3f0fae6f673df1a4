#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace prefsched {

using Rng = std::mt19937_64;

// Unbiased draw from [0, bound), bound >= 1. Rejection sampling on the raw
// engine output instead of std::uniform_int_distribution, whose mapping is
// implementation-defined; runs must replay identically everywhere.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

// Fisher-Yates shuffle driven by uniform_below; uniform over all
// permutations.
template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace prefsched
