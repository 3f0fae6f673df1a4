#include "prefsched/sched.hpp"

#include <charconv>
#include <stdexcept>

namespace prefsched {

Scheduler Scheduler::klpm(std::uint64_t k) {
  if (k == 0) {
    throw std::invalid_argument("klpm: k must be >= 1");
  }
  return {PolicyKind::klpm, k};
}

std::string Scheduler::label() const {
  switch (kind) {
    case PolicyKind::fcfs:
      return "fcfs";
    case PolicyKind::lpm:
      return "lpm";
    case PolicyKind::klpm:
      return k ? "klpm:" + std::to_string(*k) : "klpm:inf";
  }
  return "?";
}

std::optional<Scheduler> parse_policy(std::string_view text) {
  if (text == "fcfs") {
    return Scheduler::fcfs();
  }
  if (text == "lpm") {
    return Scheduler::lpm();
  }
  constexpr std::string_view prefix = "klpm:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string_view arg = text.substr(prefix.size());
    if (arg == "inf") {
      return Scheduler::klpm_inf();
    }
    std::uint64_t k = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec == std::errc{} && ptr == arg.data() + arg.size() && k >= 1) {
      return Scheduler::klpm(k);
    }
  }
  return std::nullopt;
}

void PendingSet::admit(const Query& q) {
  if (!queries_.emplace(q.id, q).second) {
    throw std::invalid_argument("admit: duplicate id " + std::to_string(q.id));
  }
  by_arrival_.emplace(q.arrival, q.id);
  index_.insert(q.id, q.prompt);
}

void PendingSet::remove(QueryId id) {
  auto it = queries_.find(id);
  if (it == queries_.end()) {
    throw std::invalid_argument("remove: unknown id " + std::to_string(id));
  }
  by_arrival_.erase({it->second.arrival, id});
  index_.remove(id);
  queries_.erase(it);
}

const Query& PendingSet::get(QueryId id) const {
  auto it = queries_.find(id);
  if (it == queries_.end()) {
    throw std::invalid_argument("get: unknown id " + std::to_string(id));
  }
  return it->second;
}

QueryId fcfs_next(const PendingSet& pending) {
  if (pending.empty()) {
    throw std::logic_error("fcfs_next: empty pending set");
  }
  return pending.by_arrival().begin()->second;
}

QueryId lpm_next(const PendingSet& pending, const std::optional<TokenSeq>& cache, Rng& rng) {
  if (pending.empty()) {
    throw std::logic_error("lpm_next: empty pending set");
  }
  static const TokenSeq no_cache;
  return pending.index().best_match(cache ? *cache : no_cache, rng).id;
}

QueryId klpm_next(const PendingSet& pending, const std::optional<TokenSeq>& cache,
                  std::uint64_t cycle_pos, const std::optional<std::uint64_t>& k, Rng& rng) {
  if (k && cycle_pos % *k == 0) {
    return fcfs_next(pending);
  }
  return lpm_next(pending, cache, rng);
}

SchedulerRun::SchedulerRun(const Scheduler& spec, std::uint64_t seed)
    : spec_(spec), rng_(seed) {}

QueryId SchedulerRun::select(const std::optional<TokenSeq>& cache) {
  switch (spec_.kind) {
    case PolicyKind::fcfs:
      return fcfs_next(pending_);
    case PolicyKind::lpm:
      return lpm_next(pending_, cache, rng_);
    case PolicyKind::klpm:
      return klpm_next(pending_, cache, processed_, spec_.k, rng_);
  }
  throw std::logic_error("select: unknown policy kind");
}

void SchedulerRun::pop(QueryId id) {
  pending_.remove(id);
  ++processed_;
}

}  // namespace prefsched
