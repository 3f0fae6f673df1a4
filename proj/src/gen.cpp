#include "prefsched/gen.hpp"

#include "prefsched/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace prefsched {

namespace {

constexpr std::uint64_t kUserStride = 1000;
constexpr std::uint64_t kDocBase = 1000000;

TokenSeq token_range(std::uint64_t first, std::uint64_t length) {
  TokenSeq seq(length);
  std::iota(seq.begin(), seq.end(), first);
  return seq;
}

void check_prompt_params(std::uint64_t n, std::uint64_t k_rep, std::uint64_t u,
                         std::uint64_t d) {
  if (n == 0) {
    throw InstanceError("n must be >= 1");
  }
  if (k_rep == 0 || n % k_rep != 0) {
    throw InstanceError("k_rep must divide n (" + std::to_string(k_rep) + " does not divide " +
                        std::to_string(n) + ")");
  }
  if (u == 0 || u > kUserStride || d == 0 || d > kUserStride) {
    throw InstanceError("u and d must lie in 1..1000");
  }
  const std::uint64_t users = n / k_rep;
  if (kUserStride * users + u > kDocBase) {
    throw InstanceError("too many user prefixes for the token layout");
  }
}

// Prompt for 1-based query index i: user ceil(i/k_rep) then doc i.
TokenSeq make_prompt(std::uint64_t i, std::uint64_t k_rep, std::uint64_t u, std::uint64_t d) {
  const std::uint64_t user = (i - 1) / k_rep + 1;
  TokenSeq prompt = token_range(kUserStride * user, u);
  const TokenSeq doc = token_range(kDocBase + kUserStride * i, d);
  prompt.insert(prompt.end(), doc.begin(), doc.end());
  return prompt;
}

}  // namespace

QueryStream gen_shuffled(const ShuffledQueueParams& params) {
  check_prompt_params(params.n, params.k_rep, params.u, params.d);
  if (params.s < 0) {
    throw InstanceError("s must be >= 0");
  }
  // sigma as a shuffled vector of arrival slots 1..n.
  std::vector<std::uint64_t> sigma(params.n);
  std::iota(sigma.begin(), sigma.end(), 1);
  Rng rng(params.seed);
  shuffle_in_place(sigma, rng);

  QueryStream stream;
  stream.queries.reserve(params.n);
  for (std::uint64_t i = 1; i <= params.n; ++i) {
    stream.queries.push_back(Query{i, make_prompt(i, params.k_rep, params.u, params.d),
                                   params.s * sigma[i - 1]});
  }
  return canonicalize(std::move(stream));
}

QueryStream gen_toy() {
  const std::uint64_t u = 5;
  const std::uint64_t d = 5;
  QueryStream stream;
  for (std::uint64_t i = 1; i <= 4; ++i) {
    const std::uint64_t user = (i % 2 == 1) ? 1 : 2;  // users alternate 1,2,1,2
    TokenSeq prompt = token_range(kUserStride * user, u);
    const TokenSeq doc = token_range(kDocBase + kUserStride * i, d);
    prompt.insert(prompt.end(), doc.begin(), doc.end());
    stream.queries.push_back(Query{i, std::move(prompt), Time(0)});
  }
  return canonicalize(std::move(stream));
}

void validate_instance(const PartitionInstance& inst) {
  if (inst.m == 0 || inst.h == 0) {
    throw InstanceError("m and h must be >= 1");
  }
  if (inst.a.size() != 3 * inst.m) {
    throw InstanceError("instance needs exactly 3m integers, got " +
                        std::to_string(inst.a.size()));
  }
  std::uint64_t sum = 0;
  for (const std::uint64_t value : inst.a) {
    if (4 * value <= inst.h || 2 * value >= inst.h) {
      throw InstanceError("element " + std::to_string(value) +
                          " violates h/4 < a < h/2 for h = " + std::to_string(inst.h));
    }
    sum += value;
  }
  if (sum != inst.m * inst.h) {
    throw InstanceError("elements sum to " + std::to_string(sum) + ", expected m*h = " +
                        std::to_string(inst.m * inst.h));
  }
}

PartitionStream gen_3partition_stream(const PartitionInstance& inst) {
  validate_instance(inst);
  const std::uint64_t m = inst.m;
  const std::uint64_t h = inst.h;
  const std::uint64_t wall = (m + m * m) * h;  // T
  const std::uint64_t period = h + m * h;      // y_i spacing

  std::uint64_t next_token = 1;
  const auto alloc = [&next_token](std::uint64_t length) {
    TokenSeq seq = token_range(next_token, length);
    next_token += length;
    return seq;
  };

  QueryStream stream;
  stream.queries.reserve(5 * m + 2);
  QueryId id = 1;
  for (std::uint64_t i = 0; i < 3 * m; ++i) {
    stream.queries.push_back(Query{id++, alloc(inst.a[i]), Time(wall)});
  }
  std::vector<TokenSeq> y_prompts;
  y_prompts.reserve(m);
  for (std::uint64_t i = 1; i <= m; ++i) {
    y_prompts.push_back(alloc(m * h));
    stream.queries.push_back(Query{id++, y_prompts.back(), Time(i * period)});
  }
  for (std::uint64_t i = 1; i <= m; ++i) {
    stream.queries.push_back(Query{id++, y_prompts[i - 1], Time(wall + i * period)});
  }
  stream.queries.push_back(Query{id++, alloc(wall), Time(0)});
  stream.queries.push_back(Query{id++, alloc(wall), Time(2 * wall)});

  return PartitionStream{canonicalize(std::move(stream)), Time(wall)};
}

QueryStream gen_poisson(const PoissonParams& params) {
  check_prompt_params(params.n, params.k_rep, params.u, params.d);
  if (!(params.rate > 0.0) || !std::isfinite(params.rate)) {
    throw InstanceError("rate must be > 0");
  }
  Rng rng(params.seed);
  std::vector<std::uint64_t> order(params.n);
  std::iota(order.begin(), order.end(), 1);
  shuffle_in_place(order, rng);

  constexpr std::uint64_t kTicksPerUnit = 1000000000;
  QueryStream stream;
  stream.queries.reserve(params.n);
  Time clock(0);
  for (std::uint64_t i = 0; i < params.n; ++i) {
    // Inverse-CDF exponential on (0, 1] so gaps are finite and >= 0.
    const double u01 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    const double gap = -std::log(u01) / params.rate;
    const auto ticks = static_cast<std::uint64_t>(std::llround(gap * kTicksPerUnit));
    clock += Time(ticks, kTicksPerUnit);
    stream.queries.push_back(
        Query{i + 1, make_prompt(order[i], params.k_rep, params.u, params.d), clock});
  }
  return canonicalize(std::move(stream));
}

}  // namespace prefsched
