#pragma once

#include "prefsched/core.hpp"

#include <cstdint>
#include <vector>

namespace prefsched {

// Parameters of the regular-arrival shuffled queue. n prompts (user)(doc):
// n/k_rep distinct user prefixes of length u, each repeated in exactly k_rep
// prompts; n distinct doc suffixes of length d; prompt i arrives at
// s * sigma(i) for a uniformly drawn permutation sigma of 1..n.
struct ShuffledQueueParams {
  std::uint64_t n = 0;
  std::uint64_t k_rep = 1;  // must divide n
  std::uint64_t u = 1;      // user prefix length, 1..1000
  std::uint64_t d = 1;      // doc suffix length, 1..1000
  Time s;                   // inter-arrival gap, >= 0
  std::uint64_t seed = 0;
};

// User blocks take token ids [1000*i, ...), docs [10^6 + 1000*j, ...), so
// distinct users and distinct docs never share a first token and prompts of
// different users have zero overlap. Throws InstanceError on parameter
// violations (k_rep not dividing n, lengths out of range).
QueryStream gen_shuffled(const ShuffledQueueParams& params);

// The four-query example stream: u = d = 5, two users alternating over ids
// 1..4, four distinct docs, all arrivals 0.
QueryStream gen_toy();

// 3m integers with sum m*h, each strictly between h/4 and h/2.
struct PartitionInstance {
  std::uint64_t m = 0;
  std::uint64_t h = 0;
  std::vector<std::uint64_t> a;
};

void validate_instance(const PartitionInstance& inst);  // throws InstanceError

struct PartitionStream {
  QueryStream stream;
  Time ttft_bound;  // T = (m + m^2) h
};

// Hardness stream: X holds 3m prompts of lengths a_i arriving at T, Y holds
// m prompts of length m*h with y_i arriving at i(h + m*h), Z repeats Y's
// prompts arriving T later, and two length-T walls w1/w2 arrive at 0 and 2T.
// Families use disjoint token ranges except z_i == y_i, so deciding ttft <= T
// feasibility decides the 3-partition instance (at c_attn = 0).
PartitionStream gen_3partition_stream(const PartitionInstance& inst);

struct PoissonParams {
  std::uint64_t n = 0;
  std::uint64_t k_rep = 1;
  std::uint64_t u = 1;
  std::uint64_t d = 1;
  double rate = 1.0;  // queries per token-time unit, > 0
  std::uint64_t seed = 0;
};

// Same prompt construction as gen_shuffled with a fresh shuffle; arrivals
// are cumulative sums of seeded exponential(rate) gaps, quantized to 1e-9
// token-time units so they serialize as short exact decimals.
QueryStream gen_poisson(const PoissonParams& params);

}  // namespace prefsched
