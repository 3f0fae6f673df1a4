#pragma once

#include "prefsched/time.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace prefsched {

// Token identifiers are opaque integers; equality is per-position.
using TokenId = std::uint64_t;
using TokenSeq = std::vector<TokenId>;
using QueryId = std::uint64_t;

// Raised when user-supplied parameters or instances violate their model
// constraints (as opposed to programming-contract violations).
struct InstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Query {
  QueryId id = 0;
  TokenSeq prompt;  // length >= 1 inside a stream
  Time arrival;     // token-time units, >= 0

  bool operator==(const Query&) const = default;
};

// Canonical order: ascending (arrival, id); ids unique within the stream.
struct QueryStream {
  std::vector<Query> queries;

  std::size_t size() const { return queries.size(); }
  bool empty() const { return queries.empty(); }
  bool operator==(const QueryStream&) const = default;
};

// Sorts into canonical order and validates ids, arrivals, and prompts.
// Idempotent; throws std::invalid_argument on duplicate ids, negative
// arrivals, or empty prompts.
QueryStream canonicalize(QueryStream stream);
bool is_canonical(const QueryStream& stream);

struct CostModel {
  Time c_attn;  // relative quadratic-attention weight, >= 0

  bool operator==(const CostModel&) const = default;
};

// A processing order: permutation of the stream's query ids.
struct Schedule {
  std::vector<QueryId> order;

  bool operator==(const Schedule&) const = default;
};

struct QueryTiming {
  QueryId id = 0;
  Time arrival;
  Time start;
  Time completion;
  Time ttft;  // completion - arrival

  bool operator==(const QueryTiming&) const = default;
};

struct SimResult {
  std::vector<QueryTiming> records;  // processing order
  std::vector<Time> sorted_ttfts;    // ascending
  Time max_ttft;                     // 0 for an empty result
  std::vector<std::pair<Time, Time>> percentile_table;  // (p, nearest-rank ttft)

  const QueryTiming& by_id(QueryId id) const;  // throws std::out_of_range
  Time ttft_percentile(const Time& p) const;

  bool operator==(const SimResult&) const = default;
};

// p50, p90, p95, p99.
const std::vector<Time>& default_percentiles();

// Nearest-rank percentile: element at 1-based index ceil(p * n) of the
// ascending sample, p in (0, 1]. Throws std::invalid_argument on an empty
// sample or p outside (0, 1].
Time percentile(const std::vector<Time>& sorted_sample, const Time& p);

// Derives sorted_ttfts, max_ttft, and the default percentile table.
SimResult finalize_result(std::vector<QueryTiming> records);

}  // namespace prefsched
