#include <gtest/gtest.h>

#include <random>

#include "optbpe/reversed_trie.h"
#include "test_support.h"

namespace optbpe {
namespace {

using Node = ReversedTrie::Node;

Node walk(const ReversedTrie& t, std::string_view forward_bytes_in_walk_order) {
  Node n = t.root();
  for (const char c : forward_bytes_in_walk_order) {
    n = t.child(n, static_cast<std::uint8_t>(c));
    if (n == ReversedTrie::kNone) return n;
  }
  return n;
}

TEST(ReversedTrie, SingleTokenIsStoredReversed) {
  const Vocabulary v = Vocabulary::from_tokens({"ab"});
  const ReversedTrie t(v);
  const Node n = walk(t, "ba");
  ASSERT_NE(n, ReversedTrie::kNone);
  EXPECT_EQ(t.terminal(n), TokenId{0});
  EXPECT_EQ(walk(t, "a"), ReversedTrie::kNone);
  EXPECT_FALSE(t.terminal(walk(t, "b")).has_value());
}

TEST(ReversedTrie, PrefixTokensGetSeparateBranches) {
  const Vocabulary v = Vocabulary::from_tokens({"a", "ab"});
  const ReversedTrie t(v);
  EXPECT_EQ(t.terminal(walk(t, "a")), TokenId{0});
  EXPECT_EQ(t.terminal(walk(t, "ba")), TokenId{1});
  EXPECT_FALSE(t.terminal(walk(t, "b")).has_value());
  EXPECT_EQ(walk(t, "ab"), ReversedTrie::kNone);
}

TEST(ReversedTrie, ByteCompleteVocabularyHasTerminalDepthOne) {
  const ReversedTrie t(test::byte_vocab({}));
  for (int b = 0; b < 256; ++b) {
    const Node n = t.child(t.root(), static_cast<std::uint8_t>(b));
    ASSERT_NE(n, ReversedTrie::kNone);
    EXPECT_EQ(t.terminal(n), static_cast<TokenId>(b));
  }
  EXPECT_EQ(t.node_count(), 257u);
}

// Soundness and completeness: find(s) succeeds exactly for tokens, checked
// over every string of length <= 5 on the toy alphabet.
TEST(ReversedTrie, ExhaustiveSoundnessOnToyVocabularies) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::string> tokens = {"a", "b", "c"};
    const int extra = static_cast<int>(rng() % 20);
    for (int i = 0; i < extra; ++i) {
      std::string s;
      const int len = 2 + static_cast<int>(rng() % 4);
      for (int j = 0; j < len; ++j) s += static_cast<char>('a' + rng() % 3);
      if (std::find(tokens.begin(), tokens.end(), s) == tokens.end()) tokens.push_back(s);
    }
    const Vocabulary v = Vocabulary::from_tokens(tokens);
    const ReversedTrie t(v);
    std::vector<std::string> frontier = {""};
    for (int len = 1; len <= 5; ++len) {
      std::vector<std::string> next;
      for (const std::string& p : frontier) {
        for (const char c : {'a', 'b', 'c'}) {
          const std::string s = p + c;
          ASSERT_EQ(t.find(s), v.lookup(s)) << s;
          next.push_back(s);
        }
      }
      frontier = std::move(next);
    }
  }
}

TEST(ReversedTrie, EveryPublishedTokenIsFound) {
  for (const Tier tier : kAllTiers) {
    const Tokenizer& tok = test::tier_tokenizer(tier);
    const Vocabulary& v = tok.vocabulary();
    for (TokenId id = 0; id < v.size(); ++id) {
      ASSERT_EQ(tok.trie().find(v.token_bytes(id)), id) << tier_name(tier);
    }
  }
}

TEST(ReversedTrie, SizeLinearInTotalTokenLength) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k100k);
  const Vocabulary& v = tok.vocabulary();
  std::size_t total = 0;
  for (TokenId id = 0; id < v.size(); ++id) total += v.token_bytes(id).size();
  EXPECT_LE(tok.trie().node_count(), total + 1);
  EXPECT_LT(tok.trie().edge_count(), tok.trie().node_count());
}

TEST(ReversedTrie, FindRejectsNonTokens) {
  const ReversedTrie t(Vocabulary::from_tokens({"abc", "c"}));
  EXPECT_FALSE(t.find("").has_value());
  EXPECT_FALSE(t.find("bc").has_value());
  EXPECT_FALSE(t.find("abcd").has_value());
  EXPECT_EQ(t.find("abc"), TokenId{0});
}

}  // namespace
}  // namespace optbpe
