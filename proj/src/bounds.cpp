#include "prefsched/bounds.hpp"

#include <stdexcept>

namespace prefsched {

namespace {

Time over_k(std::uint64_t value, std::uint64_t k) {
  if (k == 0) {
    throw std::invalid_argument("k must be >= 1");
  }
  return Time(value, k);
}

}  // namespace

Time klpm_upper(const BoundInputs& in) {
  return in.start_at + in.n * (over_k(in.u, in.k) + in.d - in.s / in.k);
}

Time lpm_lower(const BoundInputs& in) {
  return in.start_at + (Time(1) - in.epsilon) * in.n * (over_k(in.u, in.k) + in.d);
}

Time fcfs_lower(const BoundInputs& in) {
  return in.start_at + (Time(1) - in.epsilon) * in.n * (Time(in.u) + in.d - in.s);
}

Time lpm_completion_identity(std::uint64_t j, std::uint64_t k, std::uint64_t u,
                             std::uint64_t d, const Time& start_at) {
  if (k == 0) {
    throw std::invalid_argument("k must be >= 1");
  }
  const std::uint64_t users_started = (j + k - 1) / k;  // ceil(j/k)
  return start_at + Time(users_started * u) + Time(d * j);
}

bool separation_holds(const BoundInputs& in) {
  const Time upper = klpm_upper(in);
  return upper < lpm_lower(in) && upper < fcfs_lower(in);
}

}  // namespace prefsched
