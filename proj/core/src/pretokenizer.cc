#include "optbpe/pretokenizer.h"

#include <unicode/regex.h>
#include <unicode/unistr.h>
#include <unicode/utext.h>

#include <fstream>
#include <istream>
#include <span>

#include "optbpe/error.h"
#include "optbpe/unicode.h"

namespace optbpe {

using unicode::CodepointClass;

namespace {

constexpr std::string_view kR50kPattern =
    R"('(?:[sdmt]|ll|ve|re)| ?\p{L}++| ?\p{N}++| ?[^\s\p{L}\p{N}]++|\s++$|\s+(?!\S)|\s)";

constexpr std::string_view kCl100kPattern =
    R"('(?i:[sdmt]|ll|ve|re)|[^\r\n\p{L}\p{N}]?+\p{L}++|\p{N}{1,3}+| ?[^\s\p{L}\p{N}]++[\r\n]*+|\s++$|\s*[\r\n]|\s+(?!\S)|\s)";

constexpr std::string_view kO200kPattern =
    R"([^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]*[\p{Ll}\p{Lm}\p{Lo}\p{M}]+(?i:'s|'t|'re|'ve|'m|'ll|'d)?)"
    R"(|[^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]+[\p{Ll}\p{Lm}\p{Lo}\p{M}]*(?i:'s|'t|'re|'ve|'m|'ll|'d)?)"
    R"(|\p{N}{1,3})"
    R"(| ?[^\s\p{L}\p{N}]+[\r\n/]*)"
    R"(|\s*[\r\n]+)"
    R"(|\s+(?!\S))"
    R"(|\s+)";

// One decoded scalar with the classes the patterns care about.
struct Scalar {
  char32_t cp = 0;
  std::size_t len = 0;
  CodepointClass cls = CodepointClass::kOther;
  bool space = false;

  bool letter() const { return unicode::is_letter(cls); }
  bool number() const { return cls == CodepointClass::kNumber; }
  // [^\s\p{L}\p{N}]
  bool other() const { return !space && !letter() && !number(); }
  bool newline() const { return cp == '\r' || cp == '\n'; }
  // [\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]
  bool upperish() const {
    return cls == CodepointClass::kUppercaseLetter ||
           cls == CodepointClass::kTitlecaseLetter ||
           cls == CodepointClass::kModifierLetter ||
           cls == CodepointClass::kOtherLetter || cls == CodepointClass::kMark;
  }
  // [\p{Ll}\p{Lm}\p{Lo}\p{M}]
  bool lowerish() const {
    return cls == CodepointClass::kLowercaseLetter ||
           cls == CodepointClass::kModifierLetter ||
           cls == CodepointClass::kOtherLetter || cls == CodepointClass::kMark;
  }
};

// Cursor over valid UTF-8. Reading past the end yields a zero-length scalar
// that belongs to no class.
class Text {
 public:
  explicit Text(std::string_view s) : s_(s) {}

  std::size_t size() const { return s_.size(); }

  Scalar at(std::size_t pos) const {
    Scalar out;
    if (pos >= s_.size()) {
      out.cls = CodepointClass::kOther;
      out.space = true;  // neither letter, number nor other
      out.len = 0;
      out.cp = 0xFFFFFFFF;
      return out;
    }
    const auto d = unicode::decode_one(s_.substr(pos));
    out.cp = d->cp;
    out.len = d->length;
    out.cls = unicode::classify(out.cp);
    out.space = unicode::is_whitespace(out.cp);
    return out;
  }

  bool at_end(std::size_t pos) const { return pos >= s_.size(); }

  template <typename Pred>
  std::size_t skip_while(std::size_t pos, Pred pred) const {
    while (pos < s_.size()) {
      const Scalar c = at(pos);
      if (!pred(c)) break;
      pos += c.len;
    }
    return pos;
  }

  std::size_t prev(std::size_t pos) const {
    do {
      --pos;
    } while (pos > 0 && (static_cast<unsigned char>(s_[pos]) & 0xC0) == 0x80);
    return pos;
  }

 private:
  std::string_view s_;
};

// Case-insensitive ASCII letter match as the reference engine does it:
// simple case folding, under which U+017F LATIN SMALL LETTER LONG S folds
// to 's'.
bool fold_equals(char32_t cp, char lower) {
  if (cp == static_cast<char32_t>(lower)) return true;
  if (cp == static_cast<char32_t>(lower - 'a' + 'A')) return true;
  return lower == 's' && cp == 0x017F;
}

// Matches one of the suffixes after an apostrophe, trying them in order.
// Returns the byte length after the apostrophe, or 0.
std::size_t match_contraction_tail(const Text& t, std::size_t pos,
                                   std::span<const std::string_view> tails,
                                   bool ignore_case) {
  for (const std::string_view tail : tails) {
    std::size_t q = pos;
    bool ok = true;
    for (const char ch : tail) {
      const Scalar c = t.at(q);
      const bool hit = ignore_case ? fold_equals(c.cp, ch) : c.cp == static_cast<char32_t>(ch);
      if (c.len == 0 || !hit) {
        ok = false;
        break;
      }
      q += c.len;
    }
    if (ok) return q - pos;
  }
  return 0;
}

constexpr std::string_view kShortTails[] = {"s", "d", "m", "t", "ll", "ve", "re"};

// \s+(?!\S) on a whitespace run [pos, run_end). Returns the match end or
// nullopt.
std::optional<std::size_t> whitespace_not_before_nonspace(const Text& t, std::size_t pos,
                                                          std::size_t run_end) {
  if (t.at_end(run_end)) return run_end;
  const std::size_t last = t.prev(run_end);
  if (last > pos) return last;
  return std::nullopt;
}

// Position just past the last \r or \n inside the run [pos, run_end).
std::optional<std::size_t> last_newline_in_run(const Text& t, std::size_t pos,
                                               std::size_t run_end) {
  std::size_t q = run_end;
  while (q > pos) {
    q = t.prev(q);
    const Scalar c = t.at(q);
    if (c.newline()) return q + c.len;
  }
  return std::nullopt;
}

std::size_t match_r50k(const Text& t, std::size_t p) {
  const Scalar c = t.at(p);
  // '(?:[sdmt]|ll|ve|re)
  if (c.cp == '\'') {
    if (const std::size_t n = match_contraction_tail(t, p + 1, kShortTails, false)) {
      return 1 + n;
    }
  }
  //  ?\p{L}++ |  ?\p{N}++ |  ?[^\s\p{L}\p{N}]++
  const auto run_with_optional_space = [&](auto pred) -> std::size_t {
    std::size_t q = p;
    if (c.cp == ' ' && pred(t.at(p + 1))) q = p + 1;
    const Scalar first = t.at(q);
    if (first.len == 0 || !pred(first)) return 0;
    return t.skip_while(q, pred) - p;
  };
  if (const auto n = run_with_optional_space([](const Scalar& s) { return s.letter(); })) return n;
  if (const auto n = run_with_optional_space([](const Scalar& s) { return s.number(); })) return n;
  if (const auto n = run_with_optional_space([](const Scalar& s) { return s.len && s.other(); })) return n;

  // Every scalar is a letter, number, other or whitespace, so c is
  // whitespace here.
  const std::size_t run_end = t.skip_while(p, [](const Scalar& s) { return s.space; });
  // \s++$
  if (t.at_end(run_end)) return run_end - p;
  // \s+(?!\S)
  if (const auto end = whitespace_not_before_nonspace(t, p, run_end)) return *end - p;
  // \s
  return c.len;
}

std::size_t match_cl100k(const Text& t, std::size_t p) {
  const Scalar c = t.at(p);
  // '(?i:[sdmt]|ll|ve|re)
  if (c.cp == '\'') {
    if (const std::size_t n = match_contraction_tail(t, p + 1, kShortTails, true)) {
      return 1 + n;
    }
  }
  // [^\r\n\p{L}\p{N}]?+\p{L}++  (the prefix is possessive)
  {
    std::size_t q = p;
    if (!c.newline() && !c.letter() && !c.number()) q = p + c.len;
    const Scalar first = t.at(q);
    if (first.len != 0 && first.letter()) {
      return t.skip_while(q, [](const Scalar& s) { return s.letter(); }) - p;
    }
  }
  // \p{N}{1,3}+
  if (c.number()) {
    std::size_t q = p;
    for (int i = 0; i < 3; ++i) {
      const Scalar s = t.at(q);
      if (s.len == 0 || !s.number()) break;
      q += s.len;
    }
    return q - p;
  }
  //  ?[^\s\p{L}\p{N}]++[\r\n]*+
  {
    std::size_t q = p;
    if (c.cp == ' ' && t.at(p + 1).len && t.at(p + 1).other()) q = p + 1;
    const Scalar first = t.at(q);
    if (first.len != 0 && first.other()) {
      q = t.skip_while(q, [](const Scalar& s) { return s.other(); });
      q = t.skip_while(q, [](const Scalar& s) { return s.newline(); });
      return q - p;
    }
  }
  const std::size_t run_end = t.skip_while(p, [](const Scalar& s) { return s.space; });
  // \s++$
  if (t.at_end(run_end)) return run_end - p;
  // \s*[\r\n]
  if (const auto end = last_newline_in_run(t, p, run_end)) return *end - p;
  // \s+(?!\S)
  if (const auto end = whitespace_not_before_nonspace(t, p, run_end)) return *end - p;
  // \s
  return c.len;
}

constexpr std::string_view kApostropheTails[] = {"s", "t", "re", "ve", "m", "ll", "d"};

// (?i:'s|'t|'re|'ve|'m|'ll|'d)?
std::size_t optional_contraction(const Text& t, std::size_t pos) {
  if (t.at(pos).cp != '\'') return pos;
  const std::size_t n = match_contraction_tail(t, pos + 1, kApostropheTails, true);
  return n ? pos + 1 + n : pos;
}

// [\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]*[\p{Ll}\p{Lm}\p{Lo}\p{M}]+ with
// backtracking on the first run.
std::optional<std::size_t> o200k_lower_tail(const Text& t, std::size_t q) {
  const std::size_t upper_end = t.skip_while(q, [](const Scalar& s) { return s.upperish(); });
  std::size_t k = upper_end;
  for (;;) {
    const Scalar s = t.at(k);
    if (s.len != 0 && s.lowerish()) {
      const std::size_t end = t.skip_while(k, [](const Scalar& x) { return x.lowerish(); });
      return optional_contraction(t, end);
    }
    if (k == q) return std::nullopt;
    k = t.prev(k);
  }
}

// [\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]+[\p{Ll}\p{Lm}\p{Lo}\p{M}]*
std::optional<std::size_t> o200k_upper_head(const Text& t, std::size_t q) {
  const Scalar s = t.at(q);
  if (s.len == 0 || !s.upperish()) return std::nullopt;
  std::size_t end = t.skip_while(q, [](const Scalar& x) { return x.upperish(); });
  end = t.skip_while(end, [](const Scalar& x) { return x.lowerish(); });
  return optional_contraction(t, end);
}

std::size_t match_o200k(const Text& t, std::size_t p) {
  const Scalar c = t.at(p);
  // [^\r\n\p{L}\p{N}]? is greedy: try with the prefix, then without.
  const bool prefix_ok = !c.newline() && !c.letter() && !c.number();
  for (const auto word : {&o200k_lower_tail, &o200k_upper_head}) {
    if (prefix_ok) {
      if (const auto end = (*word)(t, p + c.len)) return *end - p;
    }
    if (const auto end = (*word)(t, p)) return *end - p;
  }
  // \p{N}{1,3}
  if (c.number()) {
    std::size_t q = p;
    for (int i = 0; i < 3; ++i) {
      const Scalar s = t.at(q);
      if (s.len == 0 || !s.number()) break;
      q += s.len;
    }
    return q - p;
  }
  //  ?[^\s\p{L}\p{N}]+[\r\n/]*
  {
    std::size_t q = p;
    if (c.cp == ' ' && t.at(p + 1).len && t.at(p + 1).other()) q = p + 1;
    const Scalar first = t.at(q);
    if (first.len != 0 && first.other()) {
      q = t.skip_while(q, [](const Scalar& s) { return s.other(); });
      q = t.skip_while(q, [](const Scalar& s) { return s.newline() || s.cp == '/'; });
      return q - p;
    }
  }
  const std::size_t run_end = t.skip_while(p, [](const Scalar& s) { return s.space; });
  // \s*[\r\n]+
  if (const auto end = last_newline_in_run(t, p, run_end)) return *end - p;
  // \s+(?!\S)
  if (const auto end = whitespace_not_before_nonspace(t, p, run_end)) return *end - p;
  // \s+
  return run_end - p;
}

std::string rewrite_whitespace_escapes(std::string_view pattern) {
  std::string out;
  out.reserve(pattern.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '\\' && i + 1 < pattern.size()) {
      const char next = pattern[i + 1];
      if (next == 's') {
        out += "\\p{White_Space}";
      } else if (next == 'S') {
        out += "\\P{White_Space}";
      } else {
        out += pattern.substr(i, 2);
      }
      ++i;
      continue;
    }
    out.push_back(pattern[i]);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

// Compiled ICU pattern. RegexPattern is immutable and shareable; each call
// makes its own matcher.
class CustomMatcher {
 public:
  explicit CustomMatcher(const std::string& source) {
    UErrorCode status = U_ZERO_ERROR;
    UParseError perr;
    const std::string rewritten = rewrite_whitespace_escapes(source);
    pattern_.reset(icu::RegexPattern::compile(icu::UnicodeString::fromUTF8(rewritten), 0,
                                              perr, status));
    if (U_FAILURE(status)) {
      throw ParseError(1, std::string("cannot compile pattern: ") + u_errorName(status) +
                              " at offset " + std::to_string(perr.offset));
    }
  }

  // Emits matches and the gaps between them so the output covers `text`.
  void split(std::string_view text, std::size_t base,
             const std::function<void(const PreToken&)>& emit) const {
    UErrorCode status = U_ZERO_ERROR;
    UText* ut = utext_openUTF8(nullptr, text.data(), static_cast<int64_t>(text.size()), &status);
    std::unique_ptr<icu::RegexMatcher> m(pattern_->matcher(status));
    if (U_FAILURE(status)) {
      utext_close(ut);
      throw ConsistencyError(std::string("ICU matcher setup failed: ") + u_errorName(status));
    }
    m->reset(ut);
    std::size_t cursor = 0;
    while (m->find(status) && U_SUCCESS(status)) {
      const auto start = static_cast<std::size_t>(m->start64(status));
      const auto end = static_cast<std::size_t>(m->end64(status));
      if (start > cursor) emit({text.substr(cursor, start - cursor), base + cursor, false});
      if (end > start) emit({text.substr(start, end - start), base + start, false});
      cursor = std::max(cursor, end);
    }
    if (cursor < text.size()) emit({text.substr(cursor), base + cursor, false});
    utext_close(ut);
    if (U_FAILURE(status)) {
      throw ConsistencyError(std::string("ICU match failed: ") + u_errorName(status));
    }
  }

 private:
  std::unique_ptr<icu::RegexPattern> pattern_;
};

std::string_view tier_name(Tier tier) {
  switch (tier) {
    case Tier::k50k: return "50k";
    case Tier::k100k: return "100k";
    case Tier::k200k: return "200k";
  }
  return "";
}

std::string_view tier_encoding_name(Tier tier) {
  switch (tier) {
    case Tier::k50k: return "r50k_base";
    case Tier::k100k: return "cl100k_base";
    case Tier::k200k: return "o200k_base";
  }
  return "";
}

std::string_view tier_rank_file_name(Tier tier) {
  switch (tier) {
    case Tier::k50k: return "r50k_base.tiktoken";
    case Tier::k100k: return "cl100k_base.tiktoken";
    case Tier::k200k: return "o200k_base.tiktoken";
  }
  return "";
}

std::string_view tier_pattern(Tier tier) {
  switch (tier) {
    case Tier::k50k: return kR50kPattern;
    case Tier::k100k: return kCl100kPattern;
    case Tier::k200k: return kO200kPattern;
  }
  return "";
}

std::vector<std::pair<std::string, TokenId>> tier_special_tokens(Tier tier) {
  switch (tier) {
    case Tier::k50k:
      return {{"<|endoftext|>", 50256}};
    case Tier::k100k:
      return {{"<|endoftext|>", 100257},
              {"<|fim_prefix|>", 100258},
              {"<|fim_middle|>", 100259},
              {"<|fim_suffix|>", 100260},
              {"<|endofprompt|>", 100276}};
    case Tier::k200k:
      return {{"<|endoftext|>", 199999}, {"<|endofprompt|>", 200018}};
  }
  return {};
}

Tier parse_tier(std::string_view text) {
  for (const Tier t : kAllTiers) {
    if (text == tier_name(t) || text == tier_encoding_name(t)) return t;
  }
  if (text == "50K") return Tier::k50k;
  if (text == "100K") return Tier::k100k;
  if (text == "200K") return Tier::k200k;
  throw LookupError("unknown tier '" + std::string(text) + "' (expected 50k, 100k or 200k)");
}

PretokenizerConfig PretokenizerConfig::for_tier(Tier tier) {
  PretokenizerConfig cfg;
  cfg.pattern_ = std::string(tier_pattern(tier));
  cfg.tier_ = tier;
  return cfg;
}

PretokenizerConfig PretokenizerConfig::custom(std::string pattern) {
  PretokenizerConfig cfg;
  cfg.custom_ = std::make_shared<const CustomMatcher>(pattern);
  cfg.pattern_ = std::move(pattern);
  return cfg;
}

PretokenizerConfig PretokenizerConfig::from_stream(std::istream& in) {
  std::optional<PretokenizerConfig> cfg;
  std::vector<std::string> specials;
  std::optional<InvalidUtf8Policy> policy;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = trim(view.substr(0, eq));
    const std::string_view value = trim(view.substr(eq + 1));
    if (key == "tier" || key == "pattern") {
      if (cfg) throw ParseError(line_no, "tier/pattern given more than once");
      try {
        cfg = key == "tier" ? for_tier(parse_tier(value)) : custom(std::string(value));
      } catch (const LookupError& e) {
        throw ParseError(line_no, e.what());
      } catch (const ParseError& e) {
        throw ParseError(line_no, e.what());
      }
    } else if (key == "special_token") {
      if (value.empty()) throw ParseError(line_no, "empty special_token");
      specials.emplace_back(value);
    } else if (key == "invalid_utf8") {
      if (value == "reject") {
        policy = InvalidUtf8Policy::kReject;
      } else if (value == "whole-chunk") {
        policy = InvalidUtf8Policy::kWholeChunk;
      } else {
        throw ParseError(line_no, "invalid_utf8 must be 'reject' or 'whole-chunk'");
      }
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!cfg) throw ParseError(line_no, "config names neither a tier nor a pattern");
  cfg->special_tokens = std::move(specials);
  if (policy) cfg->invalid_utf8 = *policy;
  return std::move(*cfg);
}

PretokenizerConfig PretokenizerConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pretokenizer config " + path.string());
  return from_stream(in);
}

std::uint64_t PretokenizerConfig::pattern_hash() const { return fnv1a64(pattern_); }

namespace detail {

std::size_t match_builtin(Tier tier, std::string_view text, std::size_t pos) {
  const Text t(text);
  switch (tier) {
    case Tier::k50k: return match_r50k(t, pos);
    case Tier::k100k: return match_cl100k(t, pos);
    case Tier::k200k: return match_o200k(t, pos);
  }
  throw ConsistencyError("unknown tier");
}

}  // namespace detail

namespace {

void split_segment(std::string_view doc, std::size_t begin, std::size_t end,
                   const PretokenizerConfig& config,
                   const std::function<void(const PreToken&)>& emit) {
  if (begin >= end) return;
  const std::string_view segment = doc.substr(begin, end - begin);
  if (const CustomMatcher* m = config.custom_matcher()) {
    m->split(segment, begin, emit);
    return;
  }
  const Tier tier = *config.tier();
  // Matches never look past the segment, so specials act as hard boundaries.
  const Text t(segment);
  std::size_t pos = 0;
  while (pos < segment.size()) {
    std::size_t len = 0;
    switch (tier) {
      case Tier::k50k: len = match_r50k(t, pos); break;
      case Tier::k100k: len = match_cl100k(t, pos); break;
      case Tier::k200k: len = match_o200k(t, pos); break;
    }
    if (len == 0) throw ConsistencyError("pre-tokenizer made no progress");
    emit({segment.substr(pos, len), begin + pos, false});
    pos += len;
  }
}

}  // namespace

void for_each_pretoken(std::string_view doc, const PretokenizerConfig& config,
                       const std::function<void(const PreToken&)>& emit) {
  if (doc.empty()) return;
  if (const auto bad = unicode::find_invalid_utf8(doc)) {
    if (config.invalid_utf8 == InvalidUtf8Policy::kReject) throw InvalidUtf8Error(*bad);
    emit({doc, 0, false});
    return;
  }

  std::size_t cursor = 0;
  if (!config.special_tokens.empty()) {
    std::size_t pos = 0;
    while (pos < doc.size()) {
      // Leftmost occurrence; longest literal wins at equal positions.
      std::size_t best_at = std::string_view::npos;
      std::size_t best_len = 0;
      for (const std::string& s : config.special_tokens) {
        if (s.empty()) continue;
        const std::size_t at = doc.find(s, pos);
        if (at == std::string_view::npos) continue;
        if (at < best_at || (at == best_at && s.size() > best_len)) {
          best_at = at;
          best_len = s.size();
        }
      }
      if (best_at == std::string_view::npos) break;
      split_segment(doc, cursor, best_at, config, emit);
      emit({doc.substr(best_at, best_len), best_at, true});
      cursor = pos = best_at + best_len;
    }
  }
  split_segment(doc, cursor, doc.size(), config, emit);
}

std::vector<PreToken> pretokenize(std::string_view doc, const PretokenizerConfig& config) {
  std::vector<PreToken> out;
  for_each_pretoken(doc, config, [&](const PreToken& p) { out.push_back(p); });
  return out;
}

}  // namespace optbpe
