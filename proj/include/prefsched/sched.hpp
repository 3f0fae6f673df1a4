#pragma once

#include "prefsched/core.hpp"
#include "prefsched/prefix.hpp"
#include "prefsched/rng.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

namespace prefsched {

enum class PolicyKind { fcfs, lpm, klpm };

// Policy selector. klpm cycles one FCFS pick followed by k-1 LPM picks over
// processed queries; k == nullopt is the unbounded cycle, which is exactly
// LPM (same draws, bitwise-identical schedules for equal seeds), and k == 1
// is exactly FCFS.
struct Scheduler {
  PolicyKind kind = PolicyKind::fcfs;
  std::optional<std::uint64_t> k;  // klpm only; k >= 1

  static Scheduler fcfs() { return {PolicyKind::fcfs, std::nullopt}; }
  static Scheduler lpm() { return {PolicyKind::lpm, std::nullopt}; }
  static Scheduler klpm(std::uint64_t k);  // throws std::invalid_argument if k == 0
  static Scheduler klpm_inf() { return {PolicyKind::klpm, std::nullopt}; }

  std::string label() const;  // fcfs | lpm | klpm:<k> | klpm:inf

  bool operator==(const Scheduler&) const = default;
};

// Accepts "fcfs", "lpm", "klpm:<k>", "klpm:inf".
std::optional<Scheduler> parse_policy(std::string_view text);

// Arrived-but-unprocessed queries visible to a policy at a decision point.
class PendingSet {
 public:
  void admit(const Query& q);  // throws on duplicate id
  void remove(QueryId id);     // throws on unknown id
  bool empty() const { return queries_.empty(); }
  std::size_t size() const { return queries_.size(); }
  bool contains(QueryId id) const { return queries_.count(id) > 0; }
  const Query& get(QueryId id) const;
  const std::set<std::pair<Time, QueryId>>& by_arrival() const { return by_arrival_; }
  const RadixIndex& index() const { return index_; }

 private:
  std::unordered_map<QueryId, Query> queries_;
  std::set<std::pair<Time, QueryId>> by_arrival_;
  RadixIndex index_;
};

// Earliest arrival, ties by ascending id. Throws std::logic_error on empty.
QueryId fcfs_next(const PendingSet& pending);

// Maximal prefix overlap against the cached prompt, uniform seeded
// tie-break. No cache means every overlap is zero and the draw is uniform
// over the whole pending set.
QueryId lpm_next(const PendingSet& pending, const std::optional<TokenSeq>& cache, Rng& rng);

// Cycle position 0 takes the FCFS pick, positions 1..k-1 the LPM pick;
// cycle_pos counts processed queries within the current cycle. Unbounded k
// always takes the LPM pick.
QueryId klpm_next(const PendingSet& pending, const std::optional<TokenSeq>& cache,
                  std::uint64_t cycle_pos, const std::optional<std::uint64_t>& k, Rng& rng);

// Mutable per-run policy state: pending set, tie-break generator, processed
// count. The cycle counter advances per processed query and persists across
// idle gaps. One instance per run.
class SchedulerRun {
 public:
  SchedulerRun(const Scheduler& spec, std::uint64_t seed);

  void admit(const Query& q) { pending_.admit(q); }
  QueryId select(const std::optional<TokenSeq>& cache);
  void pop(QueryId id);  // throws if id is not pending
  bool empty() const { return pending_.empty(); }
  std::size_t size() const { return pending_.size(); }
  const PendingSet& pending() const { return pending_; }
  std::uint64_t processed() const { return processed_; }

 private:
  Scheduler spec_;
  PendingSet pending_;
  Rng rng_;
  std::uint64_t processed_ = 0;
};

}  // namespace prefsched
