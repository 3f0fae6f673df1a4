#include "prefsched/rng.hpp"

#include <stdexcept>

namespace prefsched {

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) {
    throw std::invalid_argument("uniform_below: bound must be positive");
  }
  // 2^64 mod bound, computed in uint64 arithmetic.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) {
      return x % bound;
    }
  }
}

}  // namespace prefsched
