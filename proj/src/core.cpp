#include "prefsched/core.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace prefsched {

QueryStream canonicalize(QueryStream stream) {
  std::unordered_set<QueryId> seen;
  seen.reserve(stream.queries.size());
  for (const Query& q : stream.queries) {
    if (!seen.insert(q.id).second) {
      throw std::invalid_argument("duplicate query id " + std::to_string(q.id));
    }
    if (q.arrival < 0) {
      throw std::invalid_argument("negative arrival for query id " + std::to_string(q.id));
    }
    if (q.prompt.empty()) {
      throw std::invalid_argument("empty prompt for query id " + std::to_string(q.id));
    }
  }
  std::sort(stream.queries.begin(), stream.queries.end(),
            [](const Query& a, const Query& b) {
              if (a.arrival != b.arrival) {
                return a.arrival < b.arrival;
              }
              return a.id < b.id;
            });
  return stream;
}

bool is_canonical(const QueryStream& stream) {
  for (std::size_t i = 1; i < stream.queries.size(); ++i) {
    const Query& a = stream.queries[i - 1];
    const Query& b = stream.queries[i];
    if (a.arrival > b.arrival || (a.arrival == b.arrival && a.id >= b.id)) {
      return false;
    }
  }
  return true;
}

const QueryTiming& SimResult::by_id(QueryId id) const {
  for (const QueryTiming& t : records) {
    if (t.id == id) {
      return t;
    }
  }
  throw std::out_of_range("no timing record for query id " + std::to_string(id));
}

Time SimResult::ttft_percentile(const Time& p) const {
  return percentile(sorted_ttfts, p);
}

const std::vector<Time>& default_percentiles() {
  static const std::vector<Time> ps = {Time(1, 2), Time(9, 10), Time(19, 20),
                                       Time(99, 100)};
  return ps;
}

Time percentile(const std::vector<Time>& sorted_sample, const Time& p) {
  if (sorted_sample.empty()) {
    throw std::invalid_argument("empty sample");
  }
  if (p <= 0 || p > 1) {
    throw std::invalid_argument("percentile fraction must lie in (0, 1]");
  }
  const BigInt rank = ceil_of(p * static_cast<std::uint64_t>(sorted_sample.size()));
  const auto index = to_u64(rank);  // rank >= 1 since p > 0
  return sorted_sample[index - 1];
}

SimResult finalize_result(std::vector<QueryTiming> records) {
  SimResult result;
  result.records = std::move(records);
  result.sorted_ttfts.reserve(result.records.size());
  for (const QueryTiming& t : result.records) {
    result.sorted_ttfts.push_back(t.ttft);
  }
  std::sort(result.sorted_ttfts.begin(), result.sorted_ttfts.end());
  result.max_ttft = result.sorted_ttfts.empty() ? Time(0) : result.sorted_ttfts.back();
  if (!result.sorted_ttfts.empty()) {
    for (const Time& p : default_percentiles()) {
      result.percentile_table.emplace_back(p, percentile(result.sorted_ttfts, p));
    }
  }
  return result;
}

}  // namespace prefsched
