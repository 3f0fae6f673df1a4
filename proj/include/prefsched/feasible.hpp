#pragma once

#include "prefsched/core.hpp"
#include "prefsched/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace prefsched {

// Either a witness schedule or an exhaustion certificate.
struct FeasibilityOutcome {
  bool feasible = false;
  Schedule schedule;                  // witness when feasible
  std::uint64_t satisfied_count = 0;  // queries with ttft <= T under the witness
  std::string certificate;            // set when infeasible

  // Replaying schedule through run_fixed yields at least satisfied_count
  // queries with ttft <= T whenever feasible is true.
};

struct FeasibleOptions {
  std::size_t brute_force_limit = 10;  // max n for the exact search
  std::size_t max_block = 16;          // max reduced-block size for enumeration
  std::size_t max_prompt_len = 4096;
};

struct FeasibleStats {
  std::uint64_t explored_states = 0;  // search/DP transition evaluations
};

// Exhaustive branch-and-bound over processing orders. Children expand in
// deadline order; a branch dies when the chosen query overruns its deadline
// or when an unprocessed deadline has already passed the clock; dominated
// (processed-set, last) states with no earlier clock are skipped. Returns a
// witness meeting ttft <= T for every query, or exhaustion. Throws
// InstanceError when n exceeds the configured limit;
// std::invalid_argument when cfg requests batch binning.
FeasibilityOutcome brute_force(const QueryStream& stream, const Time& ttft_limit,
                               const SimConfig& cfg, const FeasibleOptions& opts = {},
                               FeasibleStats* stats = nullptr);

// Arrival-contiguous blocks of n0 = ceil(2T/p) queries; every block except
// the last drops its min(2T, size) latest arrivals to form the reduced
// block.
struct BlockDecomposition {
  std::uint64_t n0 = 0;
  std::vector<std::vector<QueryId>> blocks;    // canonical order, contiguous
  std::vector<std::vector<QueryId>> reduced;   // per-block survivors
  std::vector<std::uint64_t> removed_per_block;
};

// Requires integral ttft_limit >= 1, p in (0, 1), prompt lengths within
// opts.max_prompt_len, and (when more than one block results) that no prompt
// is an exact prefix of a distinct query's prompt. Throws InstanceError.
BlockDecomposition decompose(const QueryStream& stream, const Time& ttft_limit,
                             const Time& p, const FeasibleOptions& opts = {});

// Cache state entering a block: the last query of the previous block (or
// empty) plus the chained clock at which the block's window opens.
struct CacheInit {
  std::optional<QueryId> id;  // nullopt = empty cache
  Time window_start;
};

// One feasible (init, last) pair with its memoized witness ordering and the
// chained completion time under that witness.
struct TransitionEdge {
  std::optional<QueryId> from;
  QueryId to = 0;
  Time completion;
  std::vector<QueryId> witness;
};

// All (init, last) pairs admitting an ordering of the block that keeps every
// block query within ttft_limit, simulated at c_attn = 0 from each init's
// window start. Edges carry the minimal-completion witness per pair. Throws
// InstanceError when the block exceeds opts.max_block.
std::vector<TransitionEdge> block_transitions(const QueryStream& stream,
                                              const std::vector<QueryId>& block,
                                              const std::vector<CacheInit>& inits,
                                              const Time& ttft_limit,
                                              const FeasibleOptions& opts = {},
                                              FeasibleStats* stats = nullptr);

// Percentile relaxation at c_attn = 0: either a schedule whose
// (1-p)-percentile TTFT is at most ttft_limit (removed queries appended in
// arrival order), or a certificate that no schedule keeps every query within
// ttft_limit. Block layers form an acyclic transition graph searched
// breadth-first from the empty-cache vertex.
FeasibilityOutcome percentile_schedule(const QueryStream& stream, const Time& ttft_limit,
                                       const Time& p, const FeasibleOptions& opts = {},
                                       FeasibleStats* stats = nullptr);

}  // namespace prefsched
