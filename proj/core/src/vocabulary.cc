#include "optbpe/vocabulary.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "optbpe/error.h"

namespace optbpe {
namespace {

constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_base64_table() {
  std::array<int, 256> table{};
  for (auto& v : table) v = -1;
  for (std::size_t i = 0; i < kBase64Alphabet.size(); ++i) {
    table[static_cast<unsigned char>(kBase64Alphabet[i])] = static_cast<int>(i);
  }
  return table;
}

constexpr auto kBase64Table = make_base64_table();

}  // namespace

std::optional<std::string> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        // '=' only in the final group, only in the last two slots, and only
        // followed by more '='.
        if (!last || k < 2) return std::nullopt;
        ++pad;
        v[k] = 0;
        continue;
      }
      if (pad > 0) return std::nullopt;
      v[k] = kBase64Table[static_cast<unsigned char>(c)];
      if (v[k] < 0) return std::nullopt;
    }
    const std::uint32_t triple = (static_cast<std::uint32_t>(v[0]) << 18) |
                                 (static_cast<std::uint32_t>(v[1]) << 12) |
                                 (static_cast<std::uint32_t>(v[2]) << 6) |
                                 static_cast<std::uint32_t>(v[3]);
    out.push_back(static_cast<char>((triple >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<char>((triple >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<char>(triple & 0xFF));
    // Non-canonical encodings leave stray low bits set.
    if (pad == 1 && (v[2] & 0x3) != 0) return std::nullopt;
    if (pad == 2 && (v[1] & 0xF) != 0) return std::nullopt;
  }
  return out;
}

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t triple =
        (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])) << 16) |
        (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i + 1])) << 8) |
        static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i + 2]));
    out.push_back(kBase64Alphabet[(triple >> 18) & 0x3F]);
    out.push_back(kBase64Alphabet[(triple >> 12) & 0x3F]);
    out.push_back(kBase64Alphabet[(triple >> 6) & 0x3F]);
    out.push_back(kBase64Alphabet[triple & 0x3F]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t triple =
        static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])) << 16;
    if (rest == 2) {
      triple |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i + 1])) << 8;
    }
    out.push_back(kBase64Alphabet[(triple >> 18) & 0x3F]);
    out.push_back(kBase64Alphabet[(triple >> 12) & 0x3F]);
    out.push_back(rest == 2 ? kBase64Alphabet[(triple >> 6) & 0x3F] : '=');
    out.push_back('=');
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw IntegrityError("vocabulary may not be empty");
  ranks_.reserve(tokens_.size());
  std::size_t single_bytes = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const std::string& t = tokens_[i];
    if (t.empty()) {
      throw IntegrityError("empty token at rank " + std::to_string(i));
    }
    const auto [it, inserted] = ranks_.emplace(t, static_cast<TokenId>(i));
    if (!inserted) {
      throw IntegrityError("duplicate token '" + base64_encode(t) +
                           "' at ranks " + std::to_string(it->second) +
                           " and " + std::to_string(i));
    }
    max_token_length_ = std::max(max_token_length_, t.size());
    if (t.size() == 1) ++single_bytes;
  }
  byte_complete_ = single_bytes == 256;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::from_rank_file(std::istream& in) {
  std::vector<std::optional<std::string>> by_rank;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto space = line.find(' ');
    if (space == std::string::npos || line.find(' ', space + 1) != std::string::npos) {
      throw ParseError(line_no, "expected '<base64-token> <decimal-rank>'");
    }
    const std::string_view encoded(line.data(), space);
    const std::string_view rank_text(line.data() + space + 1, line.size() - space - 1);

    auto token = base64_decode(encoded);
    if (!token) throw ParseError(line_no, "malformed base64 token");
    if (token->empty()) throw ParseError(line_no, "empty token");

    std::uint64_t rank = 0;
    const auto [ptr, ec] =
        std::from_chars(rank_text.data(), rank_text.data() + rank_text.size(), rank);
    if (ec != std::errc() || ptr != rank_text.data() + rank_text.size() ||
        rank_text.empty()) {
      throw ParseError(line_no, "malformed rank '" + std::string(rank_text) + "'");
    }
    if (rank > std::numeric_limits<TokenId>::max() - 1) {
      throw ParseError(line_no, "rank out of range");
    }
    if (rank >= by_rank.size()) by_rank.resize(rank + 1);
    if (by_rank[rank]) {
      throw IntegrityError("duplicate rank " + std::to_string(rank) +
                           " at line " + std::to_string(line_no));
    }
    by_rank[rank] = std::move(*token);
  }
  if (in.bad()) throw IoError("read failure while loading rank file");

  std::vector<std::string> tokens;
  tokens.reserve(by_rank.size());
  for (std::size_t r = 0; r < by_rank.size(); ++r) {
    if (!by_rank[r]) {
      throw IntegrityError("ranks are not dense: rank " + std::to_string(r) +
                           " is missing");
    }
    tokens.push_back(std::move(*by_rank[r]));
  }
  return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::from_rank_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rank file " + path.string());
  return from_rank_file(in);
}

void Vocabulary::write_rank_file(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    out << base64_encode(tokens_[i]) << ' ' << i << '\n';
  }
}

std::optional<TokenId> Vocabulary::lookup(std::string_view bytes) const {
  const auto it = ranks_.find(bytes);
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

std::string_view Vocabulary::token_bytes(TokenId id) const {
  if (id >= tokens_.size()) {
    throw LookupError("token id " + std::to_string(id) + " out of range [0, " +
                      std::to_string(tokens_.size()) + ")");
  }
  return tokens_[id];
}

void Vocabulary::add_special_token(std::string text, TokenId id) {
  if (text.empty()) throw IntegrityError("special token text may not be empty");
  if (id < tokens_.size()) {
    throw IntegrityError("special token id " + std::to_string(id) +
                         " collides with a merge-token rank");
  }
  if (special_by_id_.contains(id) || specials_.contains(text)) {
    throw IntegrityError("duplicate special token '" + text + "'");
  }
  special_by_id_.emplace(id, text);
  specials_.emplace(std::move(text), id);
}

std::optional<TokenId> Vocabulary::special_token(std::string_view text) const {
  const auto it = specials_.find(text);
  if (it == specials_.end()) return std::nullopt;
  return it->second;
}

std::string_view Vocabulary::any_token_bytes(TokenId id) const {
  if (id < tokens_.size()) return tokens_[id];
  const auto it = special_by_id_.find(id);
  if (it == special_by_id_.end()) {
    throw LookupError("unknown token id " + std::to_string(id));
  }
  return it->second;
}

std::string decode(const Vocabulary& vocab, std::span<const TokenId> ids) {
  std::string out;
  for (const TokenId id : ids) out.append(vocab.any_token_bytes(id));
  return out;
}

}  // namespace optbpe
