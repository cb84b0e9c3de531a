#include <gtest/gtest.h>

#include <random>

#include "optbpe/error.h"
#include "optbpe/greedy_segmenter.h"
#include "optbpe/optimal_segmenter.h"
#include "test_support.h"

namespace optbpe {
namespace {

struct Toy {
  explicit Toy(std::vector<std::string> tokens)
      : vocab(Vocabulary::from_tokens(std::move(tokens))), trie(vocab) {}
  std::vector<std::string> optimal(std::string_view chunk) const {
    return test::pieces(vocab, encode_optimal(vocab, trie, chunk).token_ids);
  }
  std::vector<std::string> brute(std::string_view chunk) const {
    return test::pieces(vocab, brute_force_min_segmentation(vocab, chunk).token_ids);
  }
  Vocabulary vocab;
  ReversedTrie trie;
};

using Pieces = std::vector<std::string>;

TEST(Optimal, WholeChunkToken) {
  const Toy t({"a", "b", "ab"});
  EXPECT_EQ(t.optimal("ab"), (Pieces{"ab"}));
}

TEST(Optimal, TieKeepsShortestFinalToken) {
  const Toy t({"a", "b", "c", "ab", "bc"});
  EXPECT_EQ(t.optimal("abc"), (Pieces{"ab", "c"}));
  EXPECT_EQ(t.brute("abc"), (Pieces{"ab", "c"}));
}

TEST(Optimal, RepeatedByte) {
  const Toy t({"a", "aa"});
  EXPECT_EQ(t.optimal("aaa"), (Pieces{"aa", "a"}));
  EXPECT_EQ(t.brute("aaa"), (Pieces{"aa", "a"}));
  const Toy singles({"a"});
  EXPECT_EQ(singles.optimal("aaa").size(), 3u);
  EXPECT_EQ(singles.brute("aaa").size(), 3u);
}

TEST(Optimal, BeatsGreedyOnBlockingMerge) {
  const Vocabulary v = test::byte_vocab({"ab", "bcd"});
  const ReversedTrie trie(v);
  EXPECT_EQ(test::pieces(v, encode_optimal(v, trie, "abcd").token_ids), (Pieces{"a", "bcd"}));
  EXPECT_EQ(encode_greedy(v, "abcd").count(), 3u);
}

TEST(Optimal, EmptyChunk) {
  const Toy t({"a"});
  EXPECT_EQ(t.optimal("").size(), 0u);
  EXPECT_EQ(t.brute("").size(), 0u);
}

TEST(Optimal, PublishedWordsAt100k) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k100k);
  const auto opt = [&](std::string_view w) {
    return test::pieces(tok.vocabulary(),
                        encode_optimal(tok.vocabulary(), tok.trie(), w).token_ids);
  };
  EXPECT_EQ(opt("policymakers"), (Pieces{"policy", "makers"}));
  EXPECT_EQ(opt("y\xc3\xbc" "kselme"), (Pieces{"y\xc3\xbc" "k", "sel", "me"}));
}

TEST(Optimal, UnsegmentableReportsOffset) {
  const Toy t({"a", "b", "ab"});
  try {
    t.optimal("abxb");
    FAIL() << "expected UnsegmentableError";
  } catch (const UnsegmentableError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
  try {
    t.brute("abxb");
    FAIL() << "expected UnsegmentableError";
  } catch (const UnsegmentableError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(Optimal, UnreachableEndStillSegmentsLaterBytes) {
  // "x" alone is not a token but "xb" is, so every prefix ending at x is
  // unreachable while the whole chunk is reachable.
  const Toy t({"a", "b", "xb"});
  EXPECT_EQ(t.optimal("axb"), (Pieces{"a", "xb"}));
}

TEST(Optimal, BruteForceBound) {
  const Toy t({"a"});
  EXPECT_NO_THROW(t.brute(std::string(16, 'a')));
  try {
    t.brute(std::string(17, 'a'));
    FAIL() << "expected BoundError";
  } catch (const BoundError& e) {
    EXPECT_NE(std::string(e.what()).find("16"), std::string::npos);
  }
  EXPECT_NO_THROW(brute_force_min_segmentation(t.vocab, std::string(17, 'a'), 17));
}

DpState state_with(std::string_view chunk, std::vector<std::int64_t> parents) {
  DpState s;
  s.n = chunk.size();
  s.min_tokens.assign(s.n + 1, 0);
  s.previous_end.assign(s.n + 1, -1);
  for (std::size_t i = 0; i < parents.size(); ++i) {
    s.previous_end[i + 1] = parents[i];
    s.min_tokens[i + 1] = 1;
  }
  return s;
}

TEST(Backtrack, SingleByte) {
  const Toy t({"a"});
  const Segmentation s = backtrack(state_with("a", {-1}), "a", t.vocab);
  EXPECT_EQ(test::pieces(t.vocab, s.token_ids), (Pieces{"a"}));
}

TEST(Backtrack, WholeChunkParent) {
  const Toy t({"a", "b", "ab"});
  EXPECT_EQ(test::pieces(t.vocab, backtrack(state_with("ab", {-1, -1}), "ab", t.vocab).token_ids),
            (Pieces{"ab"}));
}

TEST(Backtrack, ChainOfSingles) {
  const Toy t({"a", "b", "c"});
  EXPECT_EQ(
      test::pieces(t.vocab, backtrack(state_with("abc", {-1, 0, 1}), "abc", t.vocab).token_ids),
      (Pieces{"a", "b", "c"}));
}

TEST(Backtrack, BrokenChainIsConsistencyError) {
  const Toy t({"a", "b", "ab"});
  EXPECT_THROW(backtrack(state_with("ab", {-1, 1}), "ab", t.vocab), ConsistencyError);
  EXPECT_THROW(backtrack(state_with("ab", {-1, -3}), "ab", t.vocab), ConsistencyError);
}

TEST(Backtrack, NonTokenPieceIsConsistencyError) {
  const Toy t({"a", "b"});
  EXPECT_THROW(backtrack(state_with("ab", {-1, -1}), "ab", t.vocab), ConsistencyError);
}

TEST(Dp, InvariantsOnPublishedVocabulary) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k200k);
  std::mt19937_64 rng(21);
  DpState st;
  for (int d = 0; d < 400; ++d) {
    const std::string doc = test::random_utf8(rng, 40);
    for (const PreToken& p : pretokenize(doc, tok.config())) {
      compute_dp(tok.trie(), p.bytes, true, st);
      ASSERT_EQ(st.dp(-1), 0u);
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(p.bytes.size()); ++i) {
        ASSERT_LE(st.dp(i), static_cast<std::uint32_t>(i + 1));
        if (i > 0) ASSERT_LE(st.dp(i), st.dp(i - 1) + 1);
        const std::int64_t j = st.par(i);
        ASSERT_GE(j, -1);
        ASSERT_LT(j, i);
        ASSERT_EQ(st.dp(i), st.dp(j) + 1);
        const auto piece = p.bytes.substr(static_cast<std::size_t>(j + 1),
                                          static_cast<std::size_t>(i - j));
        ASSERT_TRUE(tok.vocabulary().lookup(piece).has_value());
      }
    }
  }
}

TEST(Optimal, NeverWorseThanGreedyAndRoundTrips) {
  std::mt19937_64 rng(22);
  for (const Tier tier : kAllTiers) {
    const Tokenizer& tok = test::tier_tokenizer(tier);
    for (int d = 0; d < 500; ++d) {
      const std::string doc = test::random_utf8(rng, 60);
      for (const PreToken& p : pretokenize(doc, tok.config())) {
        const Segmentation o = encode_optimal(tok.vocabulary(), tok.trie(), p.bytes);
        ASSERT_LE(o.count(), encode_greedy(tok.vocabulary(), p.bytes).count()) << p.bytes;
        ASSERT_EQ(decode(tok.vocabulary(), o.token_ids), p.bytes);
      }
    }
  }
}

TEST(Optimal, MatchesBruteForceOnPublishedVocabulary) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k100k);
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int d = 0; d < 600; ++d) {
    const std::string doc = test::random_utf8(rng, 24);
    for (const PreToken& p : pretokenize(doc, tok.config())) {
      if (p.bytes.size() > 14) continue;
      ASSERT_EQ(encode_optimal(tok.vocabulary(), tok.trie(), p.bytes),
                brute_force_min_segmentation(tok.vocabulary(), p.bytes))
          << p.bytes;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(Optimal, ScratchReuseMatchesFreshState) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k50k);
  DpState scratch;
  std::vector<TokenId> out;
  for (const std::string_view w : {"internationalization", "a", "", "tokenization", "xyz"}) {
    out.clear();
    const std::size_t n = append_optimal(tok.vocabulary(), tok.trie(), w, out, scratch);
    EXPECT_EQ(n, out.size());
    EXPECT_EQ(out, encode_optimal(tok.vocabulary(), tok.trie(), w).token_ids);
  }
}

TEST(Optimal, SpecialPretokenMapsToId) {
  Vocabulary v = test::byte_vocab({});
  v.add_special_token("<|s|>", 500);
  const ReversedTrie trie(v);
  const PreToken p{"<|s|>", 0, true};
  EXPECT_EQ(encode_optimal(v, trie, p).token_ids, (std::vector<TokenId>{500}));
}

}  // namespace
}  // namespace optbpe
