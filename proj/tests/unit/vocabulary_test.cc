#include <gtest/gtest.h>

#include <sstream>

#include "optbpe/error.h"
#include "optbpe/vocabulary.h"
#include "test_support.h"

namespace optbpe {
namespace {

Vocabulary parse(const std::string& text) {
  std::istringstream in(text);
  return Vocabulary::from_rank_file(in);
}

std::string from_hex(const std::string& hex) {
  std::string out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out += static_cast<char>(std::stoi(hex.substr(i, 2), nullptr, 16));
  }
  return out;
}

TEST(RankFile, FirstLineOfPublished50kFile) {
  const auto spot = test::read_json_file(test::fixture_dir() / "spot_checks.json");
  const Vocabulary v =
      Vocabulary::from_rank_file(test::vocab_dir() / "r50k_base.tiktoken");
  const auto& first = spot["r50k_first_line"];
  const TokenId rank = first["rank"].get<TokenId>();
  EXPECT_EQ(rank, 0u);
  EXPECT_EQ(v.token_bytes(rank), from_hex(first["bytes_hex"].get<std::string>()));
}

TEST(RankFile, SizesMatchPublishedLineCounts) {
  const auto spot = test::read_json_file(test::fixture_dir() / "spot_checks.json");
  for (const Tier tier : kAllTiers) {
    const Vocabulary& v = test::tier_tokenizer(tier).vocabulary();
    EXPECT_EQ(v.size(), spot["rank_file_lines"][std::string(tier_name(tier))].get<std::size_t>());
    EXPECT_TRUE(v.is_byte_complete());
  }
}

TEST(RankFile, EmptyInputIsIntegrityError) {
  EXPECT_THROW(parse(""), IntegrityError);
  EXPECT_THROW(parse("\n\n"), IntegrityError);
}

TEST(RankFile, DuplicateTokenIsIntegrityError) {
  EXPECT_THROW(parse("YQ== 0\nYQ== 1\n"), IntegrityError);
}

TEST(RankFile, DuplicateRankIsIntegrityError) {
  EXPECT_THROW(parse("YQ== 0\nYg== 0\n"), IntegrityError);
}

TEST(RankFile, RankGapIsIntegrityError) {
  EXPECT_THROW(parse("YQ== 0\nYg== 2\n"), IntegrityError);
}

TEST(RankFile, MalformedBase64ReportsLine) {
  try {
    parse("YQ== 0\n!!!! 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RankFile, MalformedLinesAreParseErrors) {
  EXPECT_THROW(parse("YQ==\n"), ParseError);
  EXPECT_THROW(parse("YQ== x\n"), ParseError);
  EXPECT_THROW(parse("YQ== -1\n"), ParseError);
  EXPECT_THROW(parse("YQ 0\n"), ParseError);
  EXPECT_THROW(parse("YQ== 0 extra\n"), ParseError);
}

TEST(RankFile, CrlfAndBlankLinesTolerated) {
  const Vocabulary v = parse("YQ== 0\r\n\r\nYg== 1\r\n");
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.lookup("b"), TokenId{1});
}

TEST(RankFile, MissingFileIsIoError) {
  EXPECT_THROW(Vocabulary::from_rank_file(std::filesystem::path("/nonexistent/x.tiktoken")),
               IoError);
}

TEST(Vocabulary, MaxTokenLengthAndByteCompleteness) {
  const Vocabulary toy = Vocabulary::from_tokens({"a", "bcd", "ef"});
  EXPECT_EQ(toy.max_token_length(), 3u);
  EXPECT_FALSE(toy.is_byte_complete());
  EXPECT_TRUE(test::byte_vocab({"xy"}).is_byte_complete());
}

TEST(Vocabulary, BijectionOnToyVocabulary) {
  const Vocabulary v = test::byte_vocab({"ab", "abc", "\xff\xfe", "hello"});
  for (TokenId id = 0; id < v.size(); ++id) {
    const std::string_view t = v.token_bytes(id);
    ASSERT_EQ(v.lookup(t), id);
    const TokenId one[] = {id};
    EXPECT_EQ(decode(v, one), t);
  }
}

TEST(Vocabulary, BijectionOnPublishedVocabularies) {
  for (const Tier tier : kAllTiers) {
    const Vocabulary& v = test::tier_tokenizer(tier).vocabulary();
    for (TokenId id = 0; id < v.size(); ++id) {
      ASSERT_EQ(v.lookup(v.token_bytes(id)), id) << tier_name(tier) << " id " << id;
    }
  }
}

TEST(Vocabulary, LoadSerializeLoadIsIdentity) {
  for (const Tier tier : kAllTiers) {
    const Vocabulary& v = test::tier_tokenizer(tier).vocabulary();
    std::stringstream buf;
    v.write_rank_file(buf);
    const Vocabulary again = Vocabulary::from_rank_file(buf);
    ASSERT_EQ(again.size(), v.size());
    EXPECT_EQ(again.max_token_length(), v.max_token_length());
    for (TokenId id = 0; id < v.size(); ++id) {
      ASSERT_EQ(again.token_bytes(id), v.token_bytes(id));
    }
  }
}

TEST(Vocabulary, SerializedFormMatchesPublishedFileBytes) {
  const Vocabulary& v = test::tier_tokenizer(Tier::k100k).vocabulary();
  std::stringstream buf;
  v.write_rank_file(buf);
  std::ifstream in(test::vocab_dir() / "cl100k_base.tiktoken", std::ios::binary);
  const std::string published{std::istreambuf_iterator<char>(in), {}};
  EXPECT_EQ(buf.str(), published);
}

TEST(Decode, EmptySequence) {
  const Vocabulary v = test::byte_vocab({});
  EXPECT_EQ(decode(v, std::span<const TokenId>{}), "");
}

TEST(Decode, UnknownIdIsLookupError) {
  const Vocabulary v = test::byte_vocab({});
  const TokenId ids[] = {65, 999};
  EXPECT_THROW(decode(v, ids), LookupError);
  EXPECT_THROW(v.token_bytes(256), LookupError);
}

TEST(SpecialTokens, HeldApartFromMergeTokens) {
  Vocabulary v = test::byte_vocab({"ab"});
  v.add_special_token("<|end|>", 1000);
  EXPECT_EQ(v.special_token("<|end|>"), TokenId{1000});
  EXPECT_FALSE(v.lookup("<|end|>").has_value());
  EXPECT_EQ(v.any_token_bytes(1000), "<|end|>");
  EXPECT_EQ(v.size(), 257u);
  const TokenId ids[] = {97, 1000};
  EXPECT_EQ(decode(v, ids), "a<|end|>");
}

TEST(SpecialTokens, CollisionsRejected) {
  Vocabulary v = test::byte_vocab({});
  EXPECT_THROW(v.add_special_token("<|x|>", 5), IntegrityError);
  v.add_special_token("<|x|>", 300);
  EXPECT_THROW(v.add_special_token("<|y|>", 300), IntegrityError);
  EXPECT_THROW(v.add_special_token("<|x|>", 301), IntegrityError);
}

TEST(SpecialTokens, TierTablesRegistered) {
  const Vocabulary& v = test::tier_tokenizer(Tier::k100k).vocabulary();
  EXPECT_EQ(v.special_token("<|endoftext|>"), TokenId{100257});
  EXPECT_EQ(v.special_token("<|endofprompt|>"), TokenId{100276});
  EXPECT_EQ(test::tier_tokenizer(Tier::k50k).vocabulary().special_token("<|endoftext|>"),
            TokenId{50256});
}

TEST(Base64, StrictDecoding) {
  EXPECT_EQ(base64_decode("YQ=="), "a");
  EXPECT_EQ(base64_decode("YWI="), "ab");
  EXPECT_EQ(base64_decode("YWJj"), "abc");
  EXPECT_FALSE(base64_decode("YQ").has_value());
  EXPECT_FALSE(base64_decode("Y===").has_value());
  EXPECT_FALSE(base64_decode("YQ=a").has_value());
  EXPECT_EQ(base64_encode(std::string("\x00\xff", 2)), "AP8=");
}

}  // namespace
}  // namespace optbpe
