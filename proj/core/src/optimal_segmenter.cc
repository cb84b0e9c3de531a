#include "optbpe/optimal_segmenter.h"

#include <algorithm>

#include "optbpe/error.h"

namespace optbpe {

void compute_dp(const ReversedTrie& trie, std::string_view chunk, bool byte_complete,
                DpState& state) {
  const std::size_t n = chunk.size();
  state.n = n;
  state.min_tokens.resize(n + 1);
  state.previous_end.resize(n + 1);
  state.min_tokens[0] = 0;
  state.previous_end[0] = -1;

  std::uint32_t* dp = state.min_tokens.data() + 1;  // dp[-1] is valid
  std::int64_t* par = state.previous_end.data() + 1;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(chunk.data());

  for (std::size_t i = 0; i < n; ++i) {
    if (byte_complete) {
      dp[i] = static_cast<std::uint32_t>(i + 1);
      par[i] = static_cast<std::int64_t>(i) - 1;
    } else {
      dp[i] = DpState::kUnreachable;
      par[i] = static_cast<std::int64_t>(i) - 1;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    ReversedTrie::Node node = trie.root();
    for (std::int64_t j = static_cast<std::int64_t>(i); j >= 0; --j) {
      node = trie.child(node, bytes[j]);
      if (node == ReversedTrie::kNone) break;
      if (!trie.terminal(node)) continue;
      const std::uint32_t before = dp[j - 1];
      if (before == DpState::kUnreachable) continue;
      if (before + 1 < dp[i]) {
        dp[i] = before + 1;
        par[i] = j - 1;
      }
    }
  }
}

Segmentation backtrack(const DpState& state, std::string_view chunk, const Vocabulary& vocab) {
  if (chunk.size() != state.n) throw ConsistencyError("dp state does not match chunk length");
  Segmentation out;
  if (state.n == 0) return out;

  const auto last = static_cast<std::int64_t>(state.n) - 1;
  if (state.dp(last) == DpState::kUnreachable) {
    std::int64_t covered = -1;
    for (std::int64_t i = last; i >= 0; --i) {
      if (state.dp(i) != DpState::kUnreachable) {
        covered = i;
        break;
      }
    }
    throw UnsegmentableError(static_cast<std::size_t>(covered + 1));
  }

  std::int64_t k = last;
  while (k != -1) {
    const std::int64_t p = state.par(k);
    if (p < -1 || p >= k) {
      throw ConsistencyError("broken parent chain at position " + std::to_string(k));
    }
    const auto piece = chunk.substr(static_cast<std::size_t>(p + 1), static_cast<std::size_t>(k - p));
    const auto id = vocab.lookup(piece);
    if (!id) {
      throw ConsistencyError("parent chain selects a non-token at position " + std::to_string(p + 1));
    }
    out.token_ids.push_back(*id);
    k = p;
  }
  std::reverse(out.token_ids.begin(), out.token_ids.end());
  return out;
}

std::size_t append_optimal(const Vocabulary& vocab, const ReversedTrie& trie,
                           std::string_view chunk, std::vector<TokenId>& out,
                           DpState& scratch) {
  if (chunk.empty()) return 0;
  compute_dp(trie, chunk, vocab.is_byte_complete(), scratch);
  Segmentation s = backtrack(scratch, chunk, vocab);
  out.insert(out.end(), s.token_ids.begin(), s.token_ids.end());
  return s.count();
}

Segmentation encode_optimal(const Vocabulary& vocab, const ReversedTrie& trie,
                            std::string_view chunk) {
  DpState state;
  compute_dp(trie, chunk, vocab.is_byte_complete(), state);
  return backtrack(state, chunk, vocab);
}

Segmentation encode_optimal(const Vocabulary& vocab, const ReversedTrie& trie,
                            const PreToken& chunk) {
  if (chunk.special) {
    const auto id = vocab.special_token(chunk.bytes);
    if (!id) throw LookupError("unknown special token '" + std::string(chunk.bytes) + "'");
    return Segmentation{{*id}};
  }
  return encode_optimal(vocab, trie, chunk.bytes);
}

Segmentation brute_force_min_segmentation(const Vocabulary& vocab, std::string_view chunk,
                                          std::size_t max_length) {
  const std::size_t n = chunk.size();
  if (n > max_length) {
    throw BoundError("brute-force segmentation is limited to " + std::to_string(max_length) +
                     " bytes, got " + std::to_string(n));
  }
  if (n == 0) return {};

  // Bit b of `mask` set means a token boundary after byte b.
  const std::uint64_t masks = std::uint64_t{1} << (n - 1);
  bool found = false;
  std::vector<TokenId> best_ids;
  std::vector<std::size_t> best_lengths_reversed;
  std::size_t longest_covered_prefix = 0;

  std::vector<TokenId> ids;
  std::vector<std::size_t> lengths;
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    ids.clear();
    lengths.clear();
    std::size_t start = 0;
    bool ok = true;
    for (std::size_t b = 0; b < n; ++b) {
      const bool cut = b + 1 == n || ((mask >> b) & 1u);
      if (!cut) continue;
      const auto id = vocab.lookup(chunk.substr(start, b + 1 - start));
      if (!id) {
        ok = false;
        break;
      }
      ids.push_back(*id);
      lengths.push_back(b + 1 - start);
      start = b + 1;
    }
    longest_covered_prefix = std::max(longest_covered_prefix, start);
    if (!ok) continue;

    std::vector<std::size_t> reversed(lengths.rbegin(), lengths.rend());
    const bool better = !found || ids.size() < best_ids.size() ||
                        (ids.size() == best_ids.size() && reversed < best_lengths_reversed);
    if (better) {
      found = true;
      best_ids = ids;
      best_lengths_reversed = std::move(reversed);
    }
  }
  if (!found) throw UnsegmentableError(longest_covered_prefix);
  return Segmentation{std::move(best_ids)};
}

}  // namespace optbpe
