#include "prefsched/sim.hpp"

#include "prefsched/prefix.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace prefsched {

namespace {

struct EngineState {
  Time clock;
  std::optional<TokenSeq> cache;
};

QueryTiming advance(EngineState& state, const Query& q, const CostModel& cost) {
  Time start = state.clock;
  if (q.arrival > start) {
    start = q.arrival;
  }
  const Time completion = start + cost_of(state.cache, q.prompt, cost);
  state.clock = completion;
  state.cache = q.prompt;
  return QueryTiming{q.id, q.arrival, start, completion, completion - q.arrival};
}

Time initial_clock(const SimConfig& cfg) {
  if (cfg.start_mode == StartMode::delayed) {
    if (cfg.start_at < 0) {
      throw std::invalid_argument("delayed start must be >= 0");
    }
    return cfg.start_at;
  }
  return Time(0);
}

SimResult finish(std::vector<QueryTiming> records, const Schedule& schedule,
                 const SimConfig& cfg) {
  SimResult result = finalize_result(std::move(records));
  if (cfg.batch_bin) {
    result = batchify(result, schedule, *cfg.batch_bin);
  }
  return result;
}

}  // namespace

Time cost_of(const std::optional<TokenSeq>& prev, const TokenSeq& cur, const CostModel& cost) {
  if (cur.empty()) {
    throw std::invalid_argument("cost_of: empty prompt");
  }
  const std::uint64_t length = cur.size();
  const std::uint64_t reused = prev ? overlap(cur, *prev) : 0;
  return (Time(1) + cost.c_attn * length) * Time(length - reused);
}

SimResult run_fixed(const QueryStream& stream, const Schedule& schedule, const SimConfig& cfg) {
  if (schedule.order.size() != stream.size()) {
    throw std::invalid_argument("schedule is not a permutation: size mismatch");
  }
  std::unordered_map<QueryId, const Query*> by_id;
  by_id.reserve(stream.size());
  for (const Query& q : stream.queries) {
    by_id.emplace(q.id, &q);
  }
  std::unordered_set<QueryId> used;
  used.reserve(stream.size());

  EngineState state{initial_clock(cfg), std::nullopt};
  std::vector<QueryTiming> records;
  records.reserve(stream.size());
  for (const QueryId id : schedule.order) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw std::invalid_argument("schedule references unknown id " + std::to_string(id));
    }
    if (!used.insert(id).second) {
      throw std::invalid_argument("schedule repeats id " + std::to_string(id));
    }
    records.push_back(advance(state, *it->second, cfg.cost));
  }
  return finish(std::move(records), schedule, cfg);
}

std::pair<Schedule, SimResult> run_policy(const QueryStream& stream, const Scheduler& policy,
                                          const SimConfig& cfg, std::uint64_t seed) {
  // Admission order is canonical (arrival, id) regardless of storage order.
  std::vector<const Query*> arrivals;
  arrivals.reserve(stream.size());
  for (const Query& q : stream.queries) {
    arrivals.push_back(&q);
  }
  std::sort(arrivals.begin(), arrivals.end(), [](const Query* a, const Query* b) {
    if (a->arrival != b->arrival) {
      return a->arrival < b->arrival;
    }
    return a->id < b->id;
  });

  SchedulerRun run(policy, seed);
  EngineState state{initial_clock(cfg), std::nullopt};
  Schedule schedule;
  schedule.order.reserve(stream.size());
  std::vector<QueryTiming> records;
  records.reserve(stream.size());

  std::size_t next_arrival = 0;
  while (records.size() < stream.size()) {
    while (next_arrival < arrivals.size() &&
           arrivals[next_arrival]->arrival <= state.clock) {
      run.admit(*arrivals[next_arrival]);
      ++next_arrival;
    }
    if (run.empty()) {
      // Idle gap: jump to the next arrival. The cache is retained.
      state.clock = std::max(state.clock, arrivals[next_arrival]->arrival);
      continue;
    }
    const QueryId id = run.select(state.cache);
    const Query& q = run.pending().get(id);  // throws on an unknown/processed pick
    records.push_back(advance(state, q, cfg.cost));
    schedule.order.push_back(id);
    run.pop(id);
  }
  return {schedule, finish(std::move(records), schedule, cfg)};
}

SimResult batchify(const SimResult& result, const Schedule& schedule, std::uint64_t bin) {
  if (bin == 0) {
    throw std::invalid_argument("batchify: bin size must be >= 1");
  }
  const std::size_t n = result.records.size();
  if (schedule.order.size() != n) {
    throw std::invalid_argument("batchify: schedule does not match the result");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (schedule.order[i] != result.records[i].id) {
      throw std::invalid_argument("batchify: schedule does not match the result");
    }
  }
  std::vector<QueryTiming> records = result.records;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const std::uint64_t bin_end =
        std::min<std::uint64_t>(((i + bin - 1) / bin) * bin, n);
    QueryTiming& t = records[static_cast<std::size_t>(i - 1)];
    t.completion = result.records[static_cast<std::size_t>(bin_end - 1)].completion;
    t.ttft = t.completion - t.arrival;
  }
  return finalize_result(std::move(records));
}

}  // namespace prefsched
