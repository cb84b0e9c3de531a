#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optbpe/vocabulary.h"

namespace optbpe {

// Published vocabulary tiers: 50K (r50k_base / GPT-2), 100K (cl100k_base),
// 200K (o200k_base).
enum class Tier { k50k, k100k, k200k };

inline constexpr Tier kAllTiers[] = {Tier::k50k, Tier::k100k, Tier::k200k};

std::string_view tier_name(Tier tier);           // "50k", "100k", "200k"
std::string_view tier_encoding_name(Tier tier);  // "r50k_base", ...
std::string_view tier_rank_file_name(Tier tier); // "r50k_base.tiktoken", ...
std::string_view tier_pattern(Tier tier);        // published regex source
std::vector<std::pair<std::string, TokenId>> tier_special_tokens(Tier tier);

// Accepts "50k"/"100k"/"200k" and the encoding names. Throws LookupError.
Tier parse_tier(std::string_view text);

// A chunk of the source document. `bytes` views into the document passed to
// pretokenize(), which must outlive it.
struct PreToken {
  std::string_view bytes;
  std::size_t offset = 0;
  // Special-token literal; gets its id directly instead of being segmented.
  bool special = false;

  friend bool operator==(const PreToken&, const PreToken&) = default;
};

enum class InvalidUtf8Policy {
  kReject,      // throw InvalidUtf8Error
  kWholeChunk,  // emit the whole document as a single pre-token
};

class CustomMatcher;

// Which splitting rule to apply. Built-in tiers use hand-written matchers
// equivalent to the published patterns; custom patterns run on ICU regex.
//
// Immutable after construction apart from the public knobs; safe to share
// across threads.
class PretokenizerConfig {
 public:
  static PretokenizerConfig for_tier(Tier tier);

  // ICU regex syntax. `\s` and `\S` are rewritten to the White_Space
  // property so they agree with the built-in tiers. Throws ParseError if the
  // pattern does not compile.
  static PretokenizerConfig custom(std::string pattern);

  // Key-value file:
  //   # comment
  //   tier = 100k              (or)   pattern = <ICU regex>
  //   special_token = <|endoftext|>   (repeatable)
  //   invalid_utf8 = reject | whole-chunk
  static PretokenizerConfig from_file(const std::filesystem::path& path);
  static PretokenizerConfig from_stream(std::istream& in);

  const std::string& pattern() const { return pattern_; }
  std::optional<Tier> tier() const { return tier_; }

  // FNV-1a 64 of the pattern source, recorded in report metadata.
  std::uint64_t pattern_hash() const;

  // Literals split out before pattern matching. Empty by default, so
  // special-token text is treated as ordinary text.
  std::vector<std::string> special_tokens;
  InvalidUtf8Policy invalid_utf8 = InvalidUtf8Policy::kReject;

  const CustomMatcher* custom_matcher() const { return custom_.get(); }

 private:
  PretokenizerConfig() = default;

  std::string pattern_;
  std::optional<Tier> tier_;
  std::shared_ptr<const CustomMatcher> custom_;
};

// Calls `emit` for each pre-token in order. The concatenation of emitted
// bytes is exactly `doc`; no pre-token is empty.
void for_each_pretoken(std::string_view doc, const PretokenizerConfig& config,
                       const std::function<void(const PreToken&)>& emit);

std::vector<PreToken> pretokenize(std::string_view doc,
                                  const PretokenizerConfig& config);

namespace detail {
// Byte length of the match starting at `pos` under the built-in matcher for
// `tier`. `text` must be valid UTF-8 and pos < text.size(). Exposed for tests.
std::size_t match_builtin(Tier tier, std::string_view text, std::size_t pos);
}  // namespace detail

}  // namespace optbpe
