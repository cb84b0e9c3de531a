#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace optbpe {

// Dense rank of a token in its vocabulary, in [0, size()).
using TokenId = std::uint32_t;

// Bijective map between token byte-strings and ranks, as published in
// base64 rank files. Special tokens live in a separate table and never take
// part in segmentation.
//
// Immutable once built; safe to share across threads.
class Vocabulary {
 public:
  // Parses `<base64-token> <decimal-rank>` lines. LF or CRLF endings, blank
  // lines ignored. Throws ParseError (with 1-based line number) on malformed
  // lines and IntegrityError on duplicates, gaps or an empty file.
  static Vocabulary from_rank_file(std::istream& in);
  static Vocabulary from_rank_file(const std::filesystem::path& path);

  // Token i gets rank i. Used for toy vocabularies in tests and the oracle.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  // Writes the rank-file form read by from_rank_file.
  void write_rank_file(std::ostream& out) const;

  std::optional<TokenId> lookup(std::string_view bytes) const;

  // Throws LookupError if id >= size().
  std::string_view token_bytes(TokenId id) const;

  std::size_t size() const { return tokens_.size(); }

  // Byte length of the longest token.
  std::size_t max_token_length() const { return max_token_length_; }

  // True when all 256 single-byte strings are tokens.
  bool is_byte_complete() const { return byte_complete_; }

  // Registers a special token. Its id must not collide with a merge token
  // rank or another special.
  void add_special_token(std::string text, TokenId id);
  std::optional<TokenId> special_token(std::string_view text) const;
  const std::map<std::string, TokenId, std::less<>>& special_tokens() const {
    return specials_;
  }

  // Resolves an id from either table. Throws LookupError.
  std::string_view any_token_bytes(TokenId id) const;

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  explicit Vocabulary(std::vector<std::string> tokens);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> ranks_;
  std::map<std::string, TokenId, std::less<>> specials_;
  std::unordered_map<TokenId, std::string> special_by_id_;
  std::size_t max_token_length_ = 0;
  bool byte_complete_ = false;
};

// Concatenates token bytes in order. Throws LookupError on unknown ids.
std::string decode(const Vocabulary& vocab, std::span<const TokenId> ids);

// Strict RFC 4648 decoding (padding required). Returns nullopt on any
// malformed input.
std::optional<std::string> base64_decode(std::string_view text);
std::string base64_encode(std::string_view bytes);

}  // namespace optbpe
