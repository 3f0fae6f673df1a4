#pragma once

#include "prefsched/core.hpp"
#include "prefsched/sched.hpp"

#include <optional>
#include <utility>

namespace prefsched {

enum class StartMode { immediate, delayed };

struct SimConfig {
  CostModel cost{};
  StartMode start_mode = StartMode::immediate;
  Time start_at;  // delayed mode: clock origin T >= 0; nothing starts earlier
  std::optional<std::uint64_t> batch_bin;  // B-sized completion binning
};

// Residual prefill cost of cur given the cached previous prompt:
// (1 + c_attn * |cur|) * (|cur| - overlap(cur, prev)). An empty cache reuses
// nothing, which makes the first query cost |cur| + c_attn * |cur|^2.
Time cost_of(const std::optional<TokenSeq>& prev, const TokenSeq& cur, const CostModel& cost);

// Replays a fixed processing order through the completion recurrence:
// start = max(previous completion, arrival, clock origin). The cache holds
// only the previously processed prompt and survives idle gaps. Throws
// std::invalid_argument when schedule is not a permutation of the stream.
SimResult run_fixed(const QueryStream& stream, const Schedule& schedule, const SimConfig& cfg);

// Online loop: at each decision point the policy sees the arrived-and-
// unprocessed queries plus the cached prompt; an empty pending set jumps the
// clock to the next arrival. Replaying the emitted schedule through
// run_fixed reproduces the result field-for-field.
std::pair<Schedule, SimResult> run_policy(const QueryStream& stream, const Scheduler& policy,
                                          const SimConfig& cfg, std::uint64_t seed);

// Batch-size-B post-processing: the i-th processed query adopts the
// completion of the last query of its B-bin (the final partial bin uses the
// last query overall); starts are unchanged. Throws when bin == 0 or the
// schedule does not match the result's processing order.
SimResult batchify(const SimResult& result, const Schedule& schedule, std::uint64_t bin);

}  // namespace prefsched
