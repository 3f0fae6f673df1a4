#pragma once

#include "prefsched/core.hpp"
#include "prefsched/prefix.hpp"
#include "prefsched/rng.hpp"

#include <cstdint>
#include <vector>

namespace prefsched::testing {

// Random stream with integer arrivals and short prompts over a small
// alphabet where no prompt is a (weak) prefix of a distinct prompt.
inline QueryStream random_prefix_free_stream(Rng& rng, std::size_t n,
                                             std::uint64_t max_arrival = 8,
                                             std::size_t max_len = 6) {
  QueryStream stream;
  std::vector<TokenSeq> prompts;
  for (std::size_t i = 0; i < n; ++i) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const std::size_t len = 1 + uniform_below(rng, max_len);
      TokenSeq candidate(len);
      for (auto& tok : candidate) {
        tok = 1 + uniform_below(rng, 3);
      }
      bool clashes = false;
      for (const TokenSeq& other : prompts) {
        if (overlap(candidate, other) == std::min(candidate.size(), other.size())) {
          clashes = true;
          break;
        }
      }
      if (!clashes) {
        prompts.push_back(std::move(candidate));
        break;
      }
    }
  }
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    stream.queries.push_back(
        Query{i + 1, prompts[i], Time(uniform_below(rng, max_arrival + 1))});
  }
  return canonicalize(std::move(stream));
}

// Random stream whose prompts never share a first token (zero pairwise
// overlap) with integer arrivals and lengths.
inline QueryStream random_zero_overlap_stream(Rng& rng, std::size_t n,
                                              std::uint64_t max_arrival = 12,
                                              std::size_t max_len = 5) {
  QueryStream stream;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + uniform_below(rng, max_len);
    TokenSeq prompt(len);
    for (std::size_t j = 0; j < len; ++j) {
      prompt[j] = 1000 * (i + 1) + j;
    }
    stream.queries.push_back(Query{i + 1, std::move(prompt),
                                   Time(uniform_below(rng, max_arrival + 1))});
  }
  return canonicalize(std::move(stream));
}

// Random stream with heavy prefix sharing: prompts drawn as (group prefix)
// + (unique suffix), integer arrivals.
inline QueryStream random_clustered_stream(Rng& rng, std::size_t n,
                                           std::uint64_t max_arrival = 10) {
  const std::size_t groups = 1 + uniform_below(rng, 3);
  QueryStream stream;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g = uniform_below(rng, groups);
    const std::size_t prefix_len = 2 + uniform_below(rng, 3);
    const std::size_t suffix_len = 1 + uniform_below(rng, 3);
    TokenSeq prompt;
    for (std::size_t j = 0; j < prefix_len; ++j) {
      prompt.push_back(100 * (g + 1) + j);
    }
    for (std::size_t j = 0; j < suffix_len; ++j) {
      prompt.push_back(100000 + 100 * (i + 1) + j);
    }
    stream.queries.push_back(Query{i + 1, std::move(prompt),
                                   Time(uniform_below(rng, max_arrival + 1))});
  }
  return canonicalize(std::move(stream));
}

}  // namespace prefsched::testing
