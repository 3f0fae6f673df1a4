#pragma once

#include "prefsched/time.hpp"

#include <cstdint>

namespace prefsched {

// Closed-form TTFT bound inputs for the regular-arrival shuffled queue:
// stream size n, user/doc lengths u/d, gap s, cycle length k (equal to the
// user replication), delayed-start origin T (>= s*n in the bound setting),
// and the asymptotic slack epsilon in (0, 1).
struct BoundInputs {
  std::uint64_t n = 0;
  std::uint64_t u = 0;
  std::uint64_t d = 0;
  Time s;
  std::uint64_t k = 1;
  Time start_at;
  Time epsilon;
};

// Deterministic ceiling on k-LPM max TTFT: T + n(u/k + d - s/k).
Time klpm_upper(const BoundInputs& in);

// High-probability floor on LPM max TTFT: T + (1 - eps) n (u/k + d).
Time lpm_lower(const BoundInputs& in);

// High-probability floor on FCFS max TTFT: T + (1 - eps) n (u + d - s).
Time fcfs_lower(const BoundInputs& in);

// Completion of the j-th processed query under LPM with delayed start on a
// regular-arrival shuffled queue at c_attn = 0: T + ceil(j/k) u + d j.
Time lpm_completion_identity(std::uint64_t j, std::uint64_t k, std::uint64_t u,
                             std::uint64_t d, const Time& start_at);

// k-LPM's ceiling sits strictly below both floors at the given epsilon.
bool separation_holds(const BoundInputs& in);

}  // namespace prefsched
