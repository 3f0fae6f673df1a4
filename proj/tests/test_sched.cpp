#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "prefsched/gen.hpp"
#include "prefsched/sched.hpp"
#include "prefsched/sim.hpp"

#include <map>

using namespace prefsched;
using prefsched::testing::random_clustered_stream;

namespace {

PendingSet pending_from(const QueryStream& stream) {
  PendingSet pending;
  for (const Query& q : stream.queries) {
    pending.admit(q);
  }
  return pending;
}

}  // namespace

TEST_CASE("policy labels and parsing") {
  CHECK(Scheduler::fcfs().label() == "fcfs");
  CHECK(Scheduler::lpm().label() == "lpm");
  CHECK(Scheduler::klpm(4).label() == "klpm:4");
  CHECK(Scheduler::klpm_inf().label() == "klpm:inf");
  CHECK(parse_policy("fcfs") == Scheduler::fcfs());
  CHECK(parse_policy("lpm") == Scheduler::lpm());
  CHECK(parse_policy("klpm:3") == Scheduler::klpm(3));
  CHECK(parse_policy("klpm:inf") == Scheduler::klpm_inf());
  CHECK_FALSE(parse_policy("klpm:0").has_value());
  CHECK_FALSE(parse_policy("klpm:").has_value());
  CHECK_FALSE(parse_policy("slpm").has_value());
  CHECK_THROWS_AS(Scheduler::klpm(0), std::invalid_argument);
}

TEST_CASE("fcfs_next picks the earliest arrival, ties by id") {
  QueryStream stream;
  stream.queries.push_back(Query{1, {1}, Time(3)});
  stream.queries.push_back(Query{2, {2}, Time(1)});
  stream.queries.push_back(Query{3, {3}, Time(2)});
  PendingSet pending = pending_from(canonicalize(stream));
  CHECK(fcfs_next(pending) == 2);

  QueryStream ties;
  ties.queries.push_back(Query{9, {1}, Time(4)});
  ties.queries.push_back(Query{4, {2}, Time(4)});
  PendingSet tie_pending = pending_from(canonicalize(ties));
  CHECK(fcfs_next(tie_pending) == 4);

  PendingSet empty;
  CHECK_THROWS_AS(fcfs_next(empty), std::logic_error);

  // Toy stream: all arrivals zero, lowest id first.
  PendingSet toy = pending_from(gen_toy());
  CHECK(fcfs_next(toy) == 1);
}

TEST_CASE("lpm_next follows the cache and falls back to a uniform draw") {
  const QueryStream toy = gen_toy();
  PendingSet pending;
  pending.admit(toy.queries[2]);  // (user1)(doc3)
  pending.admit(toy.queries[1]);  // (user2)(doc2)
  Rng rng(1);
  CHECK(lpm_next(pending, toy.queries[0].prompt, rng) == 3);

  PendingSet single;
  single.admit(toy.queries[1]);
  CHECK(lpm_next(single, std::nullopt, rng) == 2);

  PendingSet empty;
  CHECK_THROWS_AS(lpm_next(empty, std::nullopt, rng), std::logic_error);
}

TEST_CASE("lpm_next with no cache draws uniformly") {
  PendingSet pending = pending_from(gen_toy());
  Rng rng(12);
  std::map<QueryId, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    counts[lpm_next(pending, std::nullopt, rng)]++;
  }
  for (QueryId id = 1; id <= 4; ++id) {
    const double freq = static_cast<double>(counts[id]) / draws;
    CHECK(freq > 0.25 - 0.02);
    CHECK(freq < 0.25 + 0.02);
  }
}

TEST_CASE("klpm_next alternates fcfs and lpm picks") {
  PendingSet pending = pending_from(gen_toy());
  Rng rng(5);
  // Cycle start (position 0): the oldest query, id tie-break.
  CHECK(klpm_next(pending, std::nullopt, 0, 2, rng) == 1);
  // Position 1 with user1 cached: the shared-prefix query.
  const TokenSeq cache = gen_toy().queries[0].prompt;
  pending.remove(1);
  CHECK(klpm_next(pending, cache, 1, 2, rng) == 3);
  // Unbounded k never takes the FCFS branch.
  Rng a(42);
  Rng b(42);
  for (std::uint64_t pos = 0; pos < 4; ++pos) {
    CHECK(klpm_next(pending, std::nullopt, pos, std::nullopt, a) ==
          lpm_next(pending, std::nullopt, b));
  }
}

TEST_CASE("klpm(1) equals fcfs and klpm(inf) equals lpm on whole runs") {
  Rng rng(2024);
  SimConfig cfg;
  for (int iter = 0; iter < 50; ++iter) {
    const std::size_t n = 2 + uniform_below(rng, 39);
    const QueryStream stream = random_clustered_stream(rng, n);
    const std::uint64_t seed = uniform_below(rng, 1u << 20);
    CHECK(run_policy(stream, Scheduler::klpm(1), cfg, seed).first ==
          run_policy(stream, Scheduler::fcfs(), cfg, seed).first);
    CHECK(run_policy(stream, Scheduler::klpm_inf(), cfg, seed).first ==
          run_policy(stream, Scheduler::lpm(), cfg, seed).first);
  }
}

TEST_CASE("fcfs schedules ignore the seed") {
  Rng rng(77);
  SimConfig cfg;
  for (int iter = 0; iter < 10; ++iter) {
    const QueryStream stream = random_clustered_stream(rng, 20);
    CHECK(run_policy(stream, Scheduler::fcfs(), cfg, 1).first ==
          run_policy(stream, Scheduler::fcfs(), cfg, 2).first);
  }
}

TEST_CASE("every odd-position pick of klpm(2) on a shuffled queue is the fcfs pick") {
  ShuffledQueueParams params;
  params.n = 12;
  params.k_rep = 2;
  params.u = 4;
  params.d = 2;
  params.s = Time(1);
  params.seed = 3;
  const QueryStream stream = gen_shuffled(params);

  // Delayed start past all arrivals so the whole queue is pending.
  SchedulerRun run(Scheduler::klpm(2), 9);
  for (const Query& q : stream.queries) {
    run.admit(q);
  }
  std::optional<TokenSeq> cache;
  for (std::size_t step = 0; step < stream.size(); ++step) {
    const QueryId expected_fcfs = fcfs_next(run.pending());
    const QueryId picked = run.select(cache);
    if (step % 2 == 0) {
      CHECK(picked == expected_fcfs);
    }
    cache = run.pending().get(picked).prompt;
    run.pop(picked);
  }
}

TEST_CASE("a query that becomes oldest is served within k steps") {
  Rng rng(31);
  SimConfig cfg;
  for (int iter = 0; iter < 25; ++iter) {
    const std::uint64_t k = 2 + uniform_below(rng, 3);
    const QueryStream stream = random_clustered_stream(rng, 15 + uniform_below(rng, 10));
    SchedulerRun run(Scheduler::klpm(k), iter);

    // Online loop mirroring run_policy, tracking how long the current oldest
    // pending query has held that role.
    std::vector<const Query*> arrivals;
    for (const Query& q : stream.queries) {
      arrivals.push_back(&q);
    }
    Time clock(0);
    std::optional<TokenSeq> cache;
    std::size_t next = 0;
    std::optional<QueryId> oldest;
    std::uint64_t steps_as_oldest = 0;
    std::size_t done = 0;
    while (done < stream.size()) {
      while (next < arrivals.size() && arrivals[next]->arrival <= clock) {
        run.admit(*arrivals[next]);
        ++next;
      }
      if (run.empty()) {
        clock = arrivals[next]->arrival;
        continue;
      }
      const QueryId current_oldest = fcfs_next(run.pending());
      if (oldest != current_oldest) {
        oldest = current_oldest;
        steps_as_oldest = 0;
      }
      const QueryId picked = run.select(cache);
      ++steps_as_oldest;
      if (picked != *oldest) {
        // Surviving k decision steps as the oldest would be starvation.
        CHECK(steps_as_oldest < k);
      } else {
        oldest.reset();
      }
      const Query& q = run.pending().get(picked);
      clock = std::max(clock, q.arrival) + cost_of(cache, q.prompt, cfg.cost);
      cache = q.prompt;
      run.pop(picked);
      ++done;
    }
  }
}
