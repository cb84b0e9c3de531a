#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "optbpe/pretokenizer.h"
#include "optbpe/segmentation.h"
#include "optbpe/vocabulary.h"

namespace optbpe {

// Rank-merge BPE as the published tokenizers run it: start from single
// bytes and repeatedly merge the adjacent pair whose concatenation has the
// lowest rank (leftmost on ties) until no adjacent pair is a token. A chunk
// that is itself a token is emitted directly, as the reference encoder does.
//
// Throws UnsegmentableError if some byte is not a token (only possible for
// vocabularies that are not byte-complete).
Segmentation encode_greedy(const Vocabulary& vocab, std::string_view chunk);

// Special pre-tokens map straight to their id.
Segmentation encode_greedy(const Vocabulary& vocab, const PreToken& chunk);

// Appends the ids for `chunk` to `out` and returns how many were added.
std::size_t append_greedy(const Vocabulary& vocab, std::string_view chunk,
                          std::vector<TokenId>& out);

}  // namespace optbpe
