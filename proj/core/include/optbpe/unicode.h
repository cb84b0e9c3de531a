#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace optbpe::unicode {

// The general-category distinctions the published pre-tokenizer patterns
// make. Everything else (punctuation, symbols, separators, controls,
// unassigned) is kOther.
enum class CodepointClass : std::uint8_t {
  kOther,
  kUppercaseLetter,  // Lu
  kLowercaseLetter,  // Ll
  kTitlecaseLetter,  // Lt
  kModifierLetter,   // Lm
  kOtherLetter,      // Lo
  kMark,             // Mn | Mc | Me
  kNumber,           // Nd | Nl | No
};

CodepointClass classify(char32_t cp);

inline bool is_letter(CodepointClass c) {
  return c >= CodepointClass::kUppercaseLetter && c <= CodepointClass::kOtherLetter;
}
inline bool is_letter(char32_t cp) { return is_letter(classify(cp)); }
inline bool is_number(char32_t cp) { return classify(cp) == CodepointClass::kNumber; }

// Unicode White_Space property.
bool is_whitespace(char32_t cp);

struct Decoded {
  char32_t cp;
  std::uint8_t length;  // bytes consumed, 1..4
};

// Decodes one scalar value at the start of `bytes`. Rejects overlong forms,
// surrogates and values above U+10FFFF. Returns nullopt on invalid input.
std::optional<Decoded> decode_one(std::string_view bytes);

// Byte offset of the first invalid sequence, or nullopt if `bytes` is valid.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

// Number of scalar values. Each invalid byte counts as one unit.
std::size_t count_scalars(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);

}  // namespace optbpe::unicode
