#include "optbpe/greedy_segmenter.h"

#include <limits>

#include "optbpe/error.h"

namespace optbpe {
namespace {

constexpr TokenId kNoRank = std::numeric_limits<TokenId>::max();

struct Part {
  std::size_t start;
  TokenId rank;  // rank of bytes [start, start of part after next)
};

}  // namespace

std::size_t append_greedy(const Vocabulary& vocab, std::string_view chunk,
                          std::vector<TokenId>& out) {
  if (chunk.empty()) return 0;
  if (const auto whole = vocab.lookup(chunk)) {
    out.push_back(*whole);
    return 1;
  }

  const auto rank_of = [&](std::size_t begin, std::size_t end) {
    const auto r = vocab.lookup(chunk.substr(begin, end - begin));
    return r ? *r : kNoRank;
  };

  // parts[i].rank caches the rank of merging part i with part i + 1. The
  // trailing sentinel part marks the end of the chunk.
  std::vector<Part> parts;
  parts.reserve(chunk.size() + 1);
  for (std::size_t i = 0; i + 1 < chunk.size(); ++i) parts.push_back({i, rank_of(i, i + 2)});
  parts.push_back({chunk.size() - 1, kNoRank});
  parts.push_back({chunk.size(), kNoRank});

  // Rank of the pair starting at part i once part i + 1 has been absorbed.
  const auto merged_rank = [&](std::size_t i) {
    if (i + 3 < parts.size()) return rank_of(parts[i].start, parts[i + 3].start);
    return kNoRank;
  };

  for (;;) {
    TokenId min_rank = kNoRank;
    std::size_t min_at = 0;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (parts[i].rank < min_rank) {
        min_rank = parts[i].rank;
        min_at = i;
      }
    }
    if (min_rank == kNoRank) break;

    if (min_at > 0) parts[min_at - 1].rank = merged_rank(min_at - 1);
    parts[min_at].rank = merged_rank(min_at);
    parts.erase(parts.begin() + static_cast<std::ptrdiff_t>(min_at) + 1);
  }

  const std::size_t before = out.size();
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const auto id = vocab.lookup(chunk.substr(parts[i].start, parts[i + 1].start - parts[i].start));
    if (!id) throw UnsegmentableError(parts[i].start);
    out.push_back(*id);
  }
  return out.size() - before;
}

Segmentation encode_greedy(const Vocabulary& vocab, std::string_view chunk) {
  Segmentation s;
  append_greedy(vocab, chunk, s.token_ids);
  return s;
}

Segmentation encode_greedy(const Vocabulary& vocab, const PreToken& chunk) {
  if (chunk.special) {
    const auto id = vocab.special_token(chunk.bytes);
    if (!id) throw LookupError("unknown special token '" + std::string(chunk.bytes) + "'");
    return Segmentation{{*id}};
  }
  return encode_greedy(vocab, chunk.bytes);
}

}  // namespace optbpe
