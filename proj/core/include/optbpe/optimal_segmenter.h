#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "optbpe/pretokenizer.h"
#include "optbpe/reversed_trie.h"
#include "optbpe/segmentation.h"
#include "optbpe/vocabulary.h"

namespace optbpe {

// Minimal token counts over prefixes of a chunk, with parent pointers for
// recovering one minimal segmentation.
//
// Positions run from -1 (the empty prefix) to n - 1. The arrays are offset by
// one so position -1 has an explicit slot; use the accessors.
struct DpState {
  static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

  std::size_t n = 0;
  // min_tokens[i + 1]: fewest tokens covering bytes [0, i].
  std::vector<std::uint32_t> min_tokens;
  // previous_end[i + 1]: end position of the token before the one ending at
  // i, in [-1, i - 1].
  std::vector<std::int64_t> previous_end;

  std::uint32_t dp(std::int64_t i) const { return min_tokens[static_cast<std::size_t>(i + 1)]; }
  std::int64_t par(std::int64_t i) const { return previous_end[static_cast<std::size_t>(i + 1)]; }
};

// Fills `state` for `chunk`. For each end position i it walks the reversed
// trie over bytes i, i-1, ... and stops as soon as no child exists; a
// candidate start j replaces the current best only on strict improvement, so
// among equally short segmentations the shortest final token wins.
//
// With `byte_complete` every position starts at the all-single-bytes bound
// (dp[i] = i + 1); otherwise it starts unreachable.
void compute_dp(const ReversedTrie& trie, std::string_view chunk, bool byte_complete,
                DpState& state);

// Follows parent pointers from n - 1 back to -1 and maps each piece to its
// id. Throws UnsegmentableError if dp[n - 1] is unreachable and
// ConsistencyError if the parent chain is broken.
Segmentation backtrack(const DpState& state, std::string_view chunk, const Vocabulary& vocab);

// Minimal-token segmentation of one chunk.
Segmentation encode_optimal(const Vocabulary& vocab, const ReversedTrie& trie,
                            std::string_view chunk);
Segmentation encode_optimal(const Vocabulary& vocab, const ReversedTrie& trie,
                            const PreToken& chunk);

// Reuses `scratch` across calls. Returns the number of ids appended.
std::size_t append_optimal(const Vocabulary& vocab, const ReversedTrie& trie,
                           std::string_view chunk, std::vector<TokenId>& out,
                           DpState& scratch);

inline constexpr std::size_t kDefaultBruteForceBound = 16;

// Exhaustive search over all 2^(n-1) boundary sets. Among minimal
// segmentations it returns the one whose token lengths, read from the last
// token backwards, are lexicographically smallest, which is the segmentation
// encode_optimal picks. Throws BoundError when the chunk is longer than
// `max_length`.
Segmentation brute_force_min_segmentation(const Vocabulary& vocab, std::string_view chunk,
                                          std::size_t max_length = kDefaultBruteForceBound);

}  // namespace optbpe
