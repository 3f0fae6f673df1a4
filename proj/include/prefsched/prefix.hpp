#pragma once

#include "prefsched/core.hpp"
#include "prefsched/rng.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace prefsched {

// Length of the maximal common prefix of x and y.
std::size_t overlap(const TokenSeq& x, const TokenSeq& y);

// Compressed trie over the pending prompts, keyed by query id. Identical
// prompts share a terminal node. Single-owner mutable state; one index per
// scheduler run.
//
// Invariants: every inserted id is reachable by exactly one root-to-terminal
// path spelling its prompt, and no non-root node has an empty id set with a
// single child (removal re-compresses).
class RadixIndex {
 public:
  RadixIndex();

  void insert(QueryId id, const TokenSeq& prompt);  // throws on duplicate id
  void insert(const Query& q) { insert(q.id, q.prompt); }
  void remove(QueryId id);  // throws on unknown id
  bool contains(QueryId id) const { return prompts_.count(id) > 0; }
  bool empty() const { return prompts_.empty(); }
  std::size_t size() const { return prompts_.size(); }

  struct Match {
    QueryId id = 0;
    std::size_t overlap_len = 0;
  };

  // A pending id attaining the maximal prefix overlap against probe; ties
  // are broken uniformly through rng (one draw, only when more than one id
  // is tied). Throws std::logic_error on an empty index.
  Match best_match(const TokenSeq& probe, Rng& rng) const;

  // Structure probes used by tests.
  std::size_t root_degree() const;
  std::vector<std::size_t> root_edge_label_lengths() const;
  std::string debug_string() const;  // canonical preorder rendering

 private:
  struct Node {
    TokenSeq label;  // edge label from the parent; empty only at the root
    std::map<TokenId, std::unique_ptr<Node>> children;  // keyed by label front
    std::vector<QueryId> ids;  // prompts ending here, ascending
    std::size_t subtree_ids = 0;
  };

  static QueryId nth_id(const Node* node, std::size_t rank);

  std::unique_ptr<Node> root_;
  std::unordered_map<QueryId, TokenSeq> prompts_;
};

// Linear-scan reference: maximal overlap value and the full argmax id set
// (ascending). The index's semantic oracle.
struct NaiveMatch {
  std::size_t overlap_len = 0;
  std::vector<QueryId> argmax;
};
NaiveMatch best_match_naive(const std::vector<std::pair<QueryId, const TokenSeq*>>& pending,
                            const TokenSeq& probe);

}  // namespace prefsched
