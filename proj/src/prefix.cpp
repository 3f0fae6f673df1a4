#include "prefsched/prefix.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace prefsched {

std::size_t overlap(const TokenSeq& x, const TokenSeq& y) {
  const std::size_t limit = std::min(x.size(), y.size());
  std::size_t len = 0;
  while (len < limit && x[len] == y[len]) {
    ++len;
  }
  return len;
}

RadixIndex::RadixIndex() : root_(std::make_unique<Node>()) {}

void RadixIndex::insert(QueryId id, const TokenSeq& prompt) {
  if (prompt.empty()) {
    throw std::invalid_argument("insert: empty prompt");
  }
  if (!prompts_.emplace(id, prompt).second) {
    throw std::invalid_argument("insert: duplicate id " + std::to_string(id));
  }
  Node* node = root_.get();
  ++node->subtree_ids;
  std::size_t pos = 0;
  for (;;) {
    if (pos == prompt.size()) {
      auto it = std::lower_bound(node->ids.begin(), node->ids.end(), id);
      node->ids.insert(it, id);
      return;
    }
    auto child_it = node->children.find(prompt[pos]);
    if (child_it == node->children.end()) {
      auto leaf = std::make_unique<Node>();
      leaf->label.assign(prompt.begin() + static_cast<std::ptrdiff_t>(pos), prompt.end());
      leaf->ids.push_back(id);
      leaf->subtree_ids = 1;
      node->children.emplace(prompt[pos], std::move(leaf));
      return;
    }
    Node* child = child_it->second.get();
    std::size_t matched = 0;
    while (matched < child->label.size() && pos + matched < prompt.size() &&
           child->label[matched] == prompt[pos + matched]) {
      ++matched;
    }
    if (matched == child->label.size()) {
      ++child->subtree_ids;
      node = child;
      pos += matched;
      continue;
    }
    // Split the edge at the matched length; the old child keeps the suffix.
    auto mid = std::make_unique<Node>();
    mid->label.assign(child->label.begin(),
                      child->label.begin() + static_cast<std::ptrdiff_t>(matched));
    std::unique_ptr<Node> old = std::move(child_it->second);
    old->label.erase(old->label.begin(),
                     old->label.begin() + static_cast<std::ptrdiff_t>(matched));
    mid->subtree_ids = old->subtree_ids + 1;
    mid->children.emplace(old->label.front(), std::move(old));
    Node* mid_ptr = mid.get();
    child_it->second = std::move(mid);
    pos += matched;
    if (pos == prompt.size()) {
      mid_ptr->ids.push_back(id);
      return;
    }
    auto leaf = std::make_unique<Node>();
    leaf->label.assign(prompt.begin() + static_cast<std::ptrdiff_t>(pos), prompt.end());
    leaf->ids.push_back(id);
    leaf->subtree_ids = 1;
    mid_ptr->children.emplace(prompt[pos], std::move(leaf));
    return;
  }
}

void RadixIndex::remove(QueryId id) {
  auto prompt_it = prompts_.find(id);
  if (prompt_it == prompts_.end()) {
    throw std::invalid_argument("remove: unknown id " + std::to_string(id));
  }
  const TokenSeq prompt = std::move(prompt_it->second);
  prompts_.erase(prompt_it);

  std::vector<Node*> path{root_.get()};
  std::size_t pos = 0;
  while (pos < prompt.size()) {
    Node* child = path.back()->children.at(prompt[pos]).get();
    pos += child->label.size();
    path.push_back(child);
  }
  Node* terminal = path.back();
  auto id_it = std::lower_bound(terminal->ids.begin(), terminal->ids.end(), id);
  terminal->ids.erase(id_it);
  for (Node* node : path) {
    --node->subtree_ids;
  }
  // Re-normalize bottom-up: drop empty subtrees, merge pass-through nodes.
  for (std::size_t i = path.size(); i-- > 1;) {
    Node* node = path[i];
    Node* parent = path[i - 1];
    if (node->subtree_ids == 0) {
      parent->children.erase(node->label.front());
    } else if (node->ids.empty() && node->children.size() == 1) {
      std::unique_ptr<Node> child = std::move(node->children.begin()->second);
      node->children.clear();
      node->label.insert(node->label.end(), child->label.begin(), child->label.end());
      node->ids = std::move(child->ids);
      node->children = std::move(child->children);
    }
  }
}

QueryId RadixIndex::nth_id(const Node* node, std::size_t rank) {
  for (;;) {
    if (rank < node->ids.size()) {
      return node->ids[rank];
    }
    rank -= node->ids.size();
    for (const auto& [front, child] : node->children) {
      if (rank < child->subtree_ids) {
        node = child.get();
        break;
      }
      rank -= child->subtree_ids;
    }
  }
}

RadixIndex::Match RadixIndex::best_match(const TokenSeq& probe, Rng& rng) const {
  if (empty()) {
    throw std::logic_error("best_match: empty index");
  }
  // Walk the probe down the tree. Every id below the deepest reachable point
  // shares exactly the consumed prefix with the probe, so the whole subtree
  // there is the tie set.
  const Node* node = root_.get();
  std::size_t depth = 0;
  const Node* tied = nullptr;
  std::size_t best = 0;
  for (;;) {
    if (depth == probe.size()) {
      tied = node;
      best = depth;
      break;
    }
    auto it = node->children.find(probe[depth]);
    if (it == node->children.end()) {
      tied = node;
      best = depth;
      break;
    }
    const Node* child = it->second.get();
    std::size_t matched = 0;
    while (matched < child->label.size() && depth + matched < probe.size() &&
           child->label[matched] == probe[depth + matched]) {
      ++matched;
    }
    if (matched < child->label.size()) {
      tied = child;
      best = depth + matched;
      break;
    }
    node = child;
    depth += matched;
  }
  const std::size_t count = tied->subtree_ids;
  const std::size_t rank =
      count > 1 ? static_cast<std::size_t>(uniform_below(rng, count)) : 0;
  return Match{nth_id(tied, rank), best};
}

std::size_t RadixIndex::root_degree() const { return root_->children.size(); }

std::vector<std::size_t> RadixIndex::root_edge_label_lengths() const {
  std::vector<std::size_t> lengths;
  lengths.reserve(root_->children.size());
  for (const auto& [front, child] : root_->children) {
    lengths.push_back(child->label.size());
  }
  return lengths;
}

std::string RadixIndex::debug_string() const {
  std::ostringstream out;
  // Preorder, children in ascending front-token order; deterministic.
  struct Walker {
    std::ostringstream& out;
    void walk(const Node* node) {
      out << '(';
      for (std::size_t i = 0; i < node->label.size(); ++i) {
        if (i > 0) {
          out << ' ';
        }
        out << node->label[i];
      }
      out << '|';
      for (std::size_t i = 0; i < node->ids.size(); ++i) {
        if (i > 0) {
          out << ' ';
        }
        out << '#' << node->ids[i];
      }
      for (const auto& [front, child] : node->children) {
        walk(child.get());
      }
      out << ')';
    }
  } walker{out};
  walker.walk(root_.get());
  return out.str();
}

NaiveMatch best_match_naive(const std::vector<std::pair<QueryId, const TokenSeq*>>& pending,
                            const TokenSeq& probe) {
  if (pending.empty()) {
    throw std::logic_error("best_match_naive: empty pending set");
  }
  NaiveMatch result;
  for (const auto& [id, prompt] : pending) {
    const std::size_t len = overlap(*prompt, probe);
    if (result.argmax.empty() || len > result.overlap_len) {
      result.overlap_len = len;
      result.argmax.assign(1, id);
    } else if (len == result.overlap_len) {
      result.argmax.push_back(id);
    }
  }
  std::sort(result.argmax.begin(), result.argmax.end());
  return result;
}

}  // namespace prefsched
