#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "prefsched/feasible.hpp"
#include "prefsched/gen.hpp"

#include <algorithm>

using namespace prefsched;
using prefsched::testing::random_prefix_free_stream;

namespace {

// Ground-truth feasibility: simulate every permutation.
bool feasible_by_full_enumeration(const QueryStream& stream, const Time& limit,
                                  const SimConfig& cfg) {
  std::vector<QueryId> order;
  for (const Query& q : stream.queries) {
    order.push_back(q.id);
  }
  std::sort(order.begin(), order.end());
  do {
    const SimResult result = run_fixed(stream, Schedule{order}, cfg);
    bool ok = true;
    for (const QueryTiming& t : result.records) {
      ok = ok && t.ttft <= limit;
    }
    if (ok) {
      return true;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

std::uint64_t count_within(const QueryStream& stream, const Schedule& schedule,
                           const Time& limit) {
  const SimResult result = run_fixed(stream, schedule, SimConfig{});
  std::uint64_t count = 0;
  for (const QueryTiming& t : result.records) {
    count += t.ttft <= limit;
  }
  return count;
}

}  // namespace

TEST_CASE("brute_force on the toy stream") {
  const QueryStream toy = gen_toy();
  SimConfig cfg;

  const FeasibilityOutcome at40 = brute_force(toy, Time(40), cfg);
  CHECK(at40.feasible);
  CHECK(at40.satisfied_count == 4);
  CHECK(count_within(toy, at40.schedule, Time(40)) == 4);

  // The LPM order reaches max TTFT 30; nothing does better.
  const FeasibilityOutcome at30 = brute_force(toy, Time(30), cfg);
  CHECK(at30.feasible);
  const FeasibilityOutcome at29 = brute_force(toy, Time(29), cfg);
  CHECK_FALSE(at29.feasible);
  CHECK(at29.certificate.find("exhausted") != std::string::npos);
}

TEST_CASE("brute_force agrees with unpruned enumeration") {
  Rng rng(61);
  SimConfig cfg;
  for (int iter = 0; iter < 40; ++iter) {
    const std::size_t n = 2 + uniform_below(rng, 6);  // up to 7
    const QueryStream stream = random_prefix_free_stream(rng, n);
    const Time limit(2 + uniform_below(rng, 10));
    const FeasibilityOutcome got = brute_force(stream, limit, cfg);
    CHECK(got.feasible == feasible_by_full_enumeration(stream, limit, cfg));
    if (got.feasible) {
      CHECK(count_within(stream, got.schedule, limit) == stream.size());
    }
  }
}

TEST_CASE("brute_force honors the instance limit and rejects batch binning") {
  Rng rng(67);
  const QueryStream big = random_prefix_free_stream(rng, 11);
  CHECK_THROWS_AS(brute_force(big, Time(5), SimConfig{}), InstanceError);

  FeasibleOptions opts;
  opts.brute_force_limit = 12;
  CHECK_NOTHROW(brute_force(big, Time(30), SimConfig{}, opts));

  SimConfig binned;
  binned.batch_bin = 2;
  CHECK_THROWS_AS(brute_force(gen_toy(), Time(40), binned), std::invalid_argument);
}

TEST_CASE("the m=1 partition stream is feasible exactly at its bound") {
  PartitionInstance inst;
  inst.m = 1;
  inst.h = 12;
  inst.a = {4, 4, 4};
  const PartitionStream ps = gen_3partition_stream(inst);
  const FeasibilityOutcome at_bound = brute_force(ps.stream, ps.ttft_bound, SimConfig{});
  CHECK(at_bound.feasible);
  CHECK(count_within(ps.stream, at_bound.schedule, ps.ttft_bound) == ps.stream.size());

  const FeasibilityOutcome below = brute_force(ps.stream, Time(20), SimConfig{});
  CHECK_FALSE(below.feasible);
}

TEST_CASE("decompose splits the stream into arrival-contiguous blocks") {
  Rng rng(71);
  const QueryStream sixteen = random_prefix_free_stream(rng, 16, 40);
  const BlockDecomposition d1 = decompose(sixteen, Time(2), Time(1, 2));
  CHECK(d1.n0 == 8);
  REQUIRE(d1.blocks.size() == 2);
  CHECK(d1.removed_per_block == std::vector<std::uint64_t>{4, 0});
  CHECK(d1.reduced[0].size() == 4);
  CHECK(d1.reduced[1].size() == 8);
  CHECK(d1.blocks[0].size() == 8);

  // Blocks are contiguous in canonical order.
  std::vector<QueryId> flattened;
  for (const auto& block : d1.blocks) {
    flattened.insert(flattened.end(), block.begin(), block.end());
  }
  std::vector<QueryId> canonical_ids;
  for (const Query& q : sixteen.queries) {
    canonical_ids.push_back(q.id);
  }
  CHECK(flattened == canonical_ids);

  const QueryStream small = random_prefix_free_stream(rng, 5);
  const BlockDecomposition single = decompose(small, Time(3), Time(1, 2));
  CHECK(single.blocks.size() == 1);
  CHECK(single.removed_per_block == std::vector<std::uint64_t>{0});
  CHECK(single.reduced[0].size() == small.size());

  const QueryStream big = random_prefix_free_stream(rng, 24, 60);
  const BlockDecomposition d2 = decompose(big, Time(2), Time(1, 3));
  CHECK(d2.n0 == 12);
  CHECK(d2.blocks.size() == 2);
}

TEST_CASE("decompose validates its preconditions") {
  Rng rng(73);
  const QueryStream stream = random_prefix_free_stream(rng, 6);
  CHECK_THROWS_AS(decompose(stream, Time(5, 2), Time(1, 2)), InstanceError);
  CHECK_THROWS_AS(decompose(stream, Time(0), Time(1, 2)), InstanceError);
  CHECK_THROWS_AS(decompose(stream, Time(3), Time(0)), InstanceError);
  CHECK_THROWS_AS(decompose(stream, Time(3), Time(1)), InstanceError);

  FeasibleOptions tight;
  tight.max_prompt_len = 2;
  CHECK_THROWS_AS(decompose(stream, Time(3), Time(1, 2), tight), InstanceError);

  // Exact-prefix prompts are rejected once more than one block exists.
  QueryStream prefixy;
  for (QueryId id = 1; id <= 10; ++id) {
    prefixy.queries.push_back(Query{id, {1, id}, Time(id)});
  }
  prefixy.queries.push_back(Query{11, {1}, Time(11)});
  prefixy = canonicalize(std::move(prefixy));
  CHECK_THROWS_AS(decompose(prefixy, Time(2), Time(1, 2)), InstanceError);
  // A single block skips the structural requirement.
  CHECK_NOTHROW(decompose(prefixy, Time(12), Time(1, 2)));
}

TEST_CASE("block_transitions enumerates feasible (init, last) pairs") {
  QueryStream stream;
  stream.queries.push_back(Query{1, {5, 6}, Time(0)});
  stream = canonicalize(std::move(stream));
  const std::vector<CacheInit> empty_init = {CacheInit{std::nullopt, Time(0)}};

  const auto single = block_transitions(stream, {1}, empty_init, Time(10));
  REQUIRE(single.size() == 1);
  CHECK(single[0].from == std::nullopt);
  CHECK(single[0].to == 1);
  CHECK(single[0].witness == std::vector<QueryId>{1});
  CHECK(single[0].completion == Time(2));

  const auto impossible = block_transitions(stream, {1}, empty_init, Time(1));
  CHECK(impossible.empty());
}

TEST_CASE("block_transitions keeps only orderings that exploit reuse when forced") {
  // A = [1 2 3 9], B = [1 2 3 8 7 6]; overlap 3. Only A-then-B meets T = 6:
  // B first finishes at 6 and leaves A at 7 > 0 + 6; A first finishes at 4
  // and B rides the shared prefix to 7 <= 1 + 6.
  QueryStream stream;
  stream.queries.push_back(Query{1, {1, 2, 3, 9}, Time(0)});
  stream.queries.push_back(Query{2, {1, 2, 3, 8, 7, 6}, Time(1)});
  stream = canonicalize(std::move(stream));
  const std::vector<CacheInit> empty_init = {CacheInit{std::nullopt, Time(0)}};

  const auto edges = block_transitions(stream, {1, 2}, empty_init, Time(6));
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].to == 2);
  CHECK(edges[0].witness == std::vector<QueryId>{1, 2});

  const FeasibilityOutcome oracle = brute_force(stream, Time(6), SimConfig{});
  CHECK(oracle.feasible);
  CHECK(oracle.schedule == Schedule{{1, 2}});
}

TEST_CASE("percentile_schedule accepts streams FCFS already satisfies") {
  QueryStream stream;
  for (QueryId id = 1; id <= 9; ++id) {
    stream.queries.push_back(Query{id, {100 * id, 100 * id + 1}, Time(3 * (id - 1))});
  }
  stream = canonicalize(std::move(stream));
  const Time limit(4);
  const Time p(1, 3);
  const FeasibilityOutcome outcome = percentile_schedule(stream, limit, p);
  CHECK(outcome.feasible);
  CHECK(outcome.satisfied_count == 9);
  const SimResult replay = run_fixed(stream, outcome.schedule, SimConfig{});
  CHECK(replay.ttft_percentile(Time(1) - p) <= limit);
}

TEST_CASE("percentile_schedule never contradicts the exact oracle") {
  Rng rng(79);
  int feasible_seen = 0;
  int infeasible_seen = 0;
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t n = 2 + uniform_below(rng, 7);
    const QueryStream stream = random_prefix_free_stream(rng, n);
    const Time limit(2 + uniform_below(rng, 8));
    const Time p = uniform_below(rng, 2) == 0 ? Time(1, 2) : Time(1, 3);
    const FeasibilityOutcome exact = brute_force(stream, limit, SimConfig{});
    const FeasibilityOutcome approx = percentile_schedule(stream, limit, p);
    if (exact.feasible) {
      CHECK(approx.feasible);
      ++feasible_seen;
    } else {
      ++infeasible_seen;
    }
    if (approx.feasible) {
      const SimResult replay = run_fixed(stream, approx.schedule, SimConfig{});
      CHECK(replay.ttft_percentile(Time(1) - p) <= limit);
      std::uint64_t satisfied = 0;
      for (const QueryTiming& t : replay.records) {
        satisfied += t.ttft <= limit;
      }
      CHECK(satisfied == approx.satisfied_count);
      const auto needed = ceil_of((Time(1) - p) * stream.size());
      CHECK(BigInt(approx.satisfied_count) >= needed);
    }
  }
  CHECK(feasible_seen > 0);
  CHECK(infeasible_seen > 0);
}

TEST_CASE("multi-block runs cross-check the oracle") {
  Rng rng(83);
  int multi_block = 0;
  int feasible_seen = 0;
  for (int iter = 0; iter < 40; ++iter) {
    const std::size_t n = 9 + uniform_below(rng, 2);
    const QueryStream stream = random_prefix_free_stream(rng, n, 16, 2);
    const Time limit(2);
    const Time p(1, 2);
    if (decompose(stream, limit, p).blocks.size() < 2) {
      continue;
    }
    ++multi_block;
    const FeasibilityOutcome exact = brute_force(stream, limit, SimConfig{});
    const FeasibilityOutcome approx = percentile_schedule(stream, limit, p);
    if (exact.feasible) {
      CHECK(approx.feasible);
    }
    if (approx.feasible) {
      ++feasible_seen;
      const SimResult replay = run_fixed(stream, approx.schedule, SimConfig{});
      CHECK(replay.ttft_percentile(Time(1) - p) <= limit);
    }
  }
  CHECK(multi_block > 0);
  CHECK(feasible_seen > 0);
}

TEST_CASE("percentile_schedule certifies the lowered partition stream infeasible") {
  PartitionInstance inst;
  inst.m = 1;
  inst.h = 12;
  inst.a = {4, 4, 4};
  const PartitionStream ps = gen_3partition_stream(inst);
  // Identical y/z prompts are fine here: the decomposition collapses to a
  // single exhaustive block at this T and p.
  const FeasibilityOutcome below = percentile_schedule(ps.stream, Time(20), Time(1, 2));
  CHECK_FALSE(below.feasible);
  CHECK_FALSE(below.certificate.empty());
  const FeasibilityOutcome oracle = brute_force(ps.stream, Time(20), SimConfig{});
  CHECK_FALSE(oracle.feasible);

  const FeasibilityOutcome at_bound = percentile_schedule(ps.stream, Time(24), Time(1, 2));
  CHECK(at_bound.feasible);
}

TEST_CASE("percentile_schedule work grows linearly in the stream length") {
  // Unit-length prompts arriving one time unit apart stay feasible at T = 1,
  // so the layered search walks every block. Fixed n0 = 4.
  const auto build = [](std::size_t n) {
    QueryStream stream;
    for (QueryId id = 1; id <= n; ++id) {
      stream.queries.push_back(Query{id, {1000 + id}, Time(id)});
    }
    return canonicalize(std::move(stream));
  };
  FeasibleStats small_stats;
  FeasibleStats big_stats;
  const FeasibilityOutcome small =
      percentile_schedule(build(240), Time(1), Time(1, 2), FeasibleOptions{}, &small_stats);
  const FeasibilityOutcome big =
      percentile_schedule(build(480), Time(1), Time(1, 2), FeasibleOptions{}, &big_stats);
  CHECK(small.feasible);
  CHECK(big.feasible);
  REQUIRE(small_stats.explored_states > 0);
  const double ratio = static_cast<double>(big_stats.explored_states) /
                       static_cast<double>(small_stats.explored_states);
  CHECK(ratio <= 2.5);
}
