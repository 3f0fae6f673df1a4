#include "prefsched/feasible.hpp"

#include "prefsched/prefix.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace prefsched {

namespace {

constexpr std::size_t kHardSearchCap = 24;  // bitmask width guard

void bump(FeasibleStats* stats) {
  if (stats != nullptr) {
    ++stats->explored_states;
  }
}

struct BruteForceContext {
  const std::vector<Query>* queries = nullptr;
  std::vector<Time> deadline;
  std::vector<std::vector<Time>> cost;   // [prev + 1][cur], row 0 = empty cache
  std::vector<std::size_t> by_deadline;  // expansion order
  std::unordered_map<std::uint64_t, Time> best_clock;
  std::vector<std::size_t> path;
  std::uint64_t visited = 0;
  FeasibleStats* stats = nullptr;
};

bool brute_force_dfs(BruteForceContext& ctx, std::uint32_t mask, std::size_t last,
                     const Time& clock) {
  const std::size_t n = ctx.queries->size();
  ++ctx.visited;
  if (ctx.path.size() == n) {
    return true;
  }
  // A pending query whose deadline has already passed kills the branch even
  // at zero residual cost (its start cannot precede the clock).
  for (const std::size_t idx : ctx.by_deadline) {
    if ((mask >> idx) & 1U) {
      continue;
    }
    if (clock > ctx.deadline[idx]) {
      return false;
    }
    break;  // earliest pending deadline is fine
  }
  for (const std::size_t idx : ctx.by_deadline) {
    if ((mask >> idx) & 1U) {
      continue;
    }
    bump(ctx.stats);
    const Query& q = (*ctx.queries)[idx];
    Time start = clock;
    if (q.arrival > start) {
      start = q.arrival;
    }
    const Time completion = start + ctx.cost[last + 1][idx];
    if (completion > ctx.deadline[idx]) {
      continue;
    }
    const std::uint32_t next_mask = mask | (1U << idx);
    const std::uint64_t key =
        (static_cast<std::uint64_t>(next_mask) << 5) | static_cast<std::uint64_t>(idx);
    const auto [it, inserted] = ctx.best_clock.try_emplace(key, completion);
    if (!inserted) {
      if (it->second <= completion) {
        continue;  // dominated: same state seen with an earlier clock
      }
      it->second = completion;
    }
    ctx.path.push_back(idx);
    if (brute_force_dfs(ctx, next_mask, idx, completion)) {
      return true;
    }
    ctx.path.pop_back();
  }
  return false;
}

const Query& query_by_id(const std::unordered_map<QueryId, const Query*>& index, QueryId id) {
  const auto it = index.find(id);
  if (it == index.end()) {
    throw std::invalid_argument("unknown query id " + std::to_string(id));
  }
  return *it->second;
}

}  // namespace

FeasibilityOutcome brute_force(const QueryStream& stream, const Time& ttft_limit,
                               const SimConfig& cfg, const FeasibleOptions& opts,
                               FeasibleStats* stats) {
  if (cfg.batch_bin) {
    throw std::invalid_argument("brute_force: batch binning is not supported");
  }
  const QueryStream canon = canonicalize(stream);
  const std::size_t n = canon.size();
  if (n > opts.brute_force_limit || n > kHardSearchCap) {
    throw InstanceError("instance too large for exact search: n = " + std::to_string(n) +
                        ", limit = " +
                        std::to_string(std::min(opts.brute_force_limit, kHardSearchCap)));
  }
  if (n == 0) {
    return FeasibilityOutcome{true, Schedule{}, 0, ""};
  }

  BruteForceContext ctx;
  ctx.queries = &canon.queries;
  ctx.stats = stats;
  ctx.deadline.reserve(n);
  for (const Query& q : canon.queries) {
    ctx.deadline.push_back(q.arrival + ttft_limit);
  }
  ctx.cost.assign(n + 1, std::vector<Time>(n));
  for (std::size_t cur = 0; cur < n; ++cur) {
    ctx.cost[0][cur] = cost_of(std::nullopt, canon.queries[cur].prompt, cfg.cost);
    for (std::size_t prev = 0; prev < n; ++prev) {
      ctx.cost[prev + 1][cur] =
          cost_of(canon.queries[prev].prompt, canon.queries[cur].prompt, cfg.cost);
    }
  }
  ctx.by_deadline.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ctx.by_deadline[i] = i;
  }
  std::sort(ctx.by_deadline.begin(), ctx.by_deadline.end(),
            [&ctx](std::size_t a, std::size_t b) {
              if (ctx.deadline[a] != ctx.deadline[b]) {
                return ctx.deadline[a] < ctx.deadline[b];
              }
              return a < b;
            });

  const Time origin = cfg.start_mode == StartMode::delayed ? cfg.start_at : Time(0);
  // last = size_t(-1) + 1 = row 0 (empty cache) via the +1 indexing.
  if (brute_force_dfs(ctx, 0, static_cast<std::size_t>(-1), origin)) {
    FeasibilityOutcome outcome;
    outcome.feasible = true;
    outcome.schedule.order.reserve(n);
    for (const std::size_t idx : ctx.path) {
      outcome.schedule.order.push_back(canon.queries[idx].id);
    }
    outcome.satisfied_count = n;
    return outcome;
  }
  FeasibilityOutcome outcome;
  outcome.feasible = false;
  std::ostringstream cert;
  cert << "exhausted " << ctx.visited << " search states over the " << n
       << "-query stream; no processing order keeps every query within T = "
       << to_number_string(ttft_limit);
  outcome.certificate = cert.str();
  return outcome;
}

BlockDecomposition decompose(const QueryStream& stream, const Time& ttft_limit, const Time& p,
                             const FeasibleOptions& opts) {
  const QueryStream canon = canonicalize(stream);
  if (!is_integer(ttft_limit) || ttft_limit < 1) {
    throw InstanceError("ttft limit must be a positive integer in token-time units");
  }
  if (!(p > 0 && p < 1)) {
    throw InstanceError("p must lie in (0, 1)");
  }
  for (const Query& q : canon.queries) {
    if (q.prompt.size() > opts.max_prompt_len) {
      throw InstanceError("prompt of query " + std::to_string(q.id) +
                          " exceeds the configured maximum length " +
                          std::to_string(opts.max_prompt_len));
    }
  }

  BlockDecomposition decomp;
  decomp.n0 = to_u64(ceil_of(2 * ttft_limit / p));
  const std::uint64_t n = canon.size();
  const std::uint64_t block_count = n == 0 ? 0 : (n + decomp.n0 - 1) / decomp.n0;

  if (block_count > 1) {
    // The block separation argument needs every query to cost at least one
    // time unit, which holds exactly when no prompt is a (weak) prefix of a
    // distinct query's prompt. A single block is a plain exhaustive search
    // and needs no such structure.
    for (std::size_t i = 0; i < canon.queries.size(); ++i) {
      for (std::size_t j = i + 1; j < canon.queries.size(); ++j) {
        const TokenSeq& a = canon.queries[i].prompt;
        const TokenSeq& b = canon.queries[j].prompt;
        if (overlap(a, b) == std::min(a.size(), b.size())) {
          throw InstanceError("prompt of query " + std::to_string(canon.queries[i].id) +
                              " is an exact prefix of query " +
                              std::to_string(canon.queries[j].id) +
                              "; percentile decomposition requires prefix-free prompts");
        }
      }
    }
  }

  const std::uint64_t removable = to_u64(ceil_of(2 * ttft_limit));
  for (std::uint64_t b = 0; b < block_count; ++b) {
    const std::uint64_t begin = b * decomp.n0;
    const std::uint64_t end = std::min<std::uint64_t>(begin + decomp.n0, n);
    std::vector<QueryId> block;
    block.reserve(end - begin);
    for (std::uint64_t i = begin; i < end; ++i) {
      block.push_back(canon.queries[i].id);
    }
    const bool last_block = b + 1 == block_count;
    const std::uint64_t removed =
        last_block ? 0 : std::min<std::uint64_t>(removable, block.size());
    std::vector<QueryId> reduced(block.begin(),
                                 block.end() - static_cast<std::ptrdiff_t>(removed));
    decomp.blocks.push_back(std::move(block));
    decomp.reduced.push_back(std::move(reduced));
    decomp.removed_per_block.push_back(removed);
  }
  return decomp;
}

namespace {

using QueryIndex = std::unordered_map<QueryId, const Query*>;

QueryIndex build_index(const QueryStream& stream) {
  QueryIndex index;
  index.reserve(stream.size());
  for (const Query& q : stream.queries) {
    index.emplace(q.id, &q);
  }
  return index;
}

std::vector<TransitionEdge> block_transitions_indexed(const QueryIndex& index,
                                                      const std::vector<QueryId>& block,
                                                      const std::vector<CacheInit>& inits,
                                                      const Time& ttft_limit,
                                                      const FeasibleOptions& opts,
                                                      FeasibleStats* stats) {
  const std::size_t m = block.size();
  if (m > opts.max_block || m > kHardSearchCap) {
    throw InstanceError("block too large for exact enumeration: " + std::to_string(m) +
                        " queries, limit " +
                        std::to_string(std::min(opts.max_block, kHardSearchCap)));
  }
  std::vector<TransitionEdge> edges;
  if (m == 0) {
    return edges;
  }
  std::vector<const Query*> members;
  members.reserve(m);
  for (const QueryId id : block) {
    members.push_back(&query_by_id(index, id));
  }
  std::vector<Time> deadline;
  deadline.reserve(m);
  for (const Query* q : members) {
    deadline.push_back(q->arrival + ttft_limit);
  }
  const CostModel zero_attn{};  // the block algorithm is defined at c_attn = 0
  std::vector<std::vector<Time>> pair_cost(m, std::vector<Time>(m));
  for (std::size_t prev = 0; prev < m; ++prev) {
    for (std::size_t cur = 0; cur < m; ++cur) {
      pair_cost[prev][cur] = cost_of(members[prev]->prompt, members[cur]->prompt, zero_attn);
    }
  }

  const std::size_t full = (std::size_t{1} << m) - 1;
  const Time unset(-1);
  std::vector<Time> best((full + 1) * m, unset);
  std::vector<std::size_t> prev_of((full + 1) * m, m);  // m = base marker
  const auto at = [m](std::size_t mask, std::size_t last) { return mask * m + last; };

  for (const CacheInit& init : inits) {
    std::fill(best.begin(), best.end(), unset);
    std::fill(prev_of.begin(), prev_of.end(), m);
    const TokenSeq* init_prompt =
        init.id ? &query_by_id(index, *init.id).prompt : nullptr;

    for (std::size_t j = 0; j < m; ++j) {
      bump(stats);
      Time start = init.window_start;
      if (members[j]->arrival > start) {
        start = members[j]->arrival;
      }
      const Time completion =
          start + cost_of(init_prompt ? std::optional<TokenSeq>(*init_prompt) : std::nullopt,
                          members[j]->prompt, zero_attn);
      if (completion <= deadline[j]) {
        best[at(std::size_t{1} << j, j)] = completion;
      }
    }
    for (std::size_t mask = 1; mask <= full; ++mask) {
      for (std::size_t last = 0; last < m; ++last) {
        if (((mask >> last) & 1U) == 0 || best[at(mask, last)] < 0) {
          continue;
        }
        const Time& clock = best[at(mask, last)];
        for (std::size_t j = 0; j < m; ++j) {
          if ((mask >> j) & 1U) {
            continue;
          }
          bump(stats);
          Time start = clock;
          if (members[j]->arrival > start) {
            start = members[j]->arrival;
          }
          const Time completion = start + pair_cost[last][j];
          if (completion > deadline[j]) {
            continue;
          }
          Time& slot = best[at(mask | (std::size_t{1} << j), j)];
          if (slot < 0 || completion < slot) {
            slot = completion;
            prev_of[at(mask | (std::size_t{1} << j), j)] = last;
          }
        }
      }
    }
    for (std::size_t last = 0; last < m; ++last) {
      if (best[at(full, last)] < 0) {
        continue;
      }
      TransitionEdge edge;
      edge.from = init.id;
      edge.to = block[last];
      edge.completion = best[at(full, last)];
      std::size_t mask = full;
      std::size_t cur = last;
      while (cur != m) {
        edge.witness.push_back(block[cur]);
        const std::size_t parent = prev_of[at(mask, cur)];
        mask ^= std::size_t{1} << cur;
        cur = parent;
      }
      std::reverse(edge.witness.begin(), edge.witness.end());
      edges.push_back(std::move(edge));
    }
  }
  return edges;
}

}  // namespace

std::vector<TransitionEdge> block_transitions(const QueryStream& stream,
                                              const std::vector<QueryId>& block,
                                              const std::vector<CacheInit>& inits,
                                              const Time& ttft_limit,
                                              const FeasibleOptions& opts,
                                              FeasibleStats* stats) {
  return block_transitions_indexed(build_index(stream), block, inits, ttft_limit, opts,
                                   stats);
}

FeasibilityOutcome percentile_schedule(const QueryStream& stream, const Time& ttft_limit,
                                       const Time& p, const FeasibleOptions& opts,
                                       FeasibleStats* stats) {
  const QueryStream canon = canonicalize(stream);
  const BlockDecomposition decomp = decompose(canon, ttft_limit, p, opts);
  const std::size_t block_count = decomp.blocks.size();
  if (block_count == 0) {
    return FeasibilityOutcome{true, Schedule{}, 0, ""};
  }

  struct Vertex {
    std::optional<QueryId> last;
    Time clock;
    std::size_t parent = 0;         // index into the previous layer
    std::vector<QueryId> witness;   // ordering of this layer's reduced block
  };
  std::vector<std::vector<Vertex>> layers;
  layers.push_back({Vertex{std::nullopt, Time(0), 0, {}}});

  for (std::size_t b = 0; b < block_count; ++b) {
    const std::vector<Vertex>& frontier = layers.back();
    std::vector<CacheInit> inits;
    inits.reserve(frontier.size());
    for (const Vertex& v : frontier) {
      inits.push_back(CacheInit{v.last, v.clock});
    }
    const std::vector<TransitionEdge> edges =
        block_transitions(canon, decomp.reduced[b], inits, ttft_limit, opts, stats);

    // Parent lookup by cache-init id; layer vertices have unique last ids.
    std::unordered_map<QueryId, std::size_t> parent_of;
    std::size_t empty_parent = frontier.size();
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      if (frontier[i].last) {
        parent_of.emplace(*frontier[i].last, i);
      } else {
        empty_parent = i;
      }
    }
    // Keep the earliest chained completion per last query; later feasible
    // continuations only improve with an earlier clock.
    std::map<QueryId, Vertex> best;
    for (const TransitionEdge& edge : edges) {
      const std::size_t parent = edge.from ? parent_of.at(*edge.from) : empty_parent;
      auto it = best.find(edge.to);
      if (it == best.end() || edge.completion < it->second.clock) {
        best[edge.to] = Vertex{edge.to, edge.completion, parent, edge.witness};
      }
    }
    if (best.empty()) {
      FeasibilityOutcome outcome;
      outcome.feasible = false;
      std::ostringstream cert;
      cert << "block " << (b + 1) << " of " << block_count
           << " admits no feasible (cache initialization, last query) pair; "
           << "no schedule keeps every query within T = " << to_number_string(ttft_limit);
      outcome.certificate = cert.str();
      return outcome;
    }
    std::vector<Vertex> layer;
    layer.reserve(best.size());
    for (auto& [id, vertex] : best) {
      layer.push_back(std::move(vertex));
    }
    layers.push_back(std::move(layer));
  }

  // Any final-layer vertex completes a path; take the earliest clock.
  const std::vector<Vertex>& final_layer = layers.back();
  std::size_t pick = 0;
  for (std::size_t i = 1; i < final_layer.size(); ++i) {
    if (final_layer[i].clock < final_layer[pick].clock) {
      pick = i;
    }
  }
  std::vector<const std::vector<QueryId>*> ordered_witnesses(block_count);
  std::size_t at = pick;
  for (std::size_t layer = layers.size() - 1; layer >= 1; --layer) {
    ordered_witnesses[layer - 1] = &layers[layer][at].witness;
    at = layers[layer][at].parent;
  }

  FeasibilityOutcome outcome;
  outcome.feasible = true;
  outcome.schedule.order.reserve(canon.size());
  for (const std::vector<QueryId>* witness : ordered_witnesses) {
    outcome.schedule.order.insert(outcome.schedule.order.end(), witness->begin(),
                                  witness->end());
  }
  // Removed queries run last, in arrival order; block tails are already
  // canonical-contiguous.
  for (std::size_t b = 0; b < block_count; ++b) {
    const std::vector<QueryId>& block = decomp.blocks[b];
    for (std::size_t i = decomp.reduced[b].size(); i < block.size(); ++i) {
      outcome.schedule.order.push_back(block[i]);
    }
  }

  SimConfig replay_cfg;
  const SimResult replay = run_fixed(canon, outcome.schedule, replay_cfg);
  for (const QueryTiming& t : replay.records) {
    if (t.ttft <= ttft_limit) {
      ++outcome.satisfied_count;
    }
  }
  return outcome;
}

}  // namespace prefsched
