#include "optbpe/unicode.h"

#include <algorithm>
#include <array>

namespace optbpe::unicode {
namespace {

struct ClassRange {
  char32_t first;
  char32_t last;
  CodepointClass cls;
};

#include "unicode_tables.inc"

constexpr char32_t kFastLimit = 0x800;

std::array<CodepointClass, kFastLimit> make_fast_table() {
  std::array<CodepointClass, kFastLimit> table{};
  table.fill(CodepointClass::kOther);
  for (const ClassRange& r : kClassRanges) {
    if (r.first >= kFastLimit) break;
    for (char32_t cp = r.first; cp <= r.last && cp < kFastLimit; ++cp) {
      table[cp] = r.cls;
    }
  }
  return table;
}

const std::array<CodepointClass, kFastLimit>& fast_table() {
  static const auto table = make_fast_table();
  return table;
}

}  // namespace

CodepointClass classify(char32_t cp) {
  if (cp < kFastLimit) return fast_table()[cp];
  const ClassRange* end = kClassRanges + kClassRangeCount;
  const ClassRange* it = std::upper_bound(
      kClassRanges, end, cp,
      [](char32_t value, const ClassRange& r) { return value < r.first; });
  if (it == kClassRanges) return CodepointClass::kOther;
  --it;
  return cp <= it->last ? it->cls : CodepointClass::kOther;
}

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::optional<Decoded> decode_one(std::string_view bytes) {
  if (bytes.empty()) return std::nullopt;
  const auto b0 = static_cast<unsigned char>(bytes[0]);
  if (b0 < 0x80) return Decoded{b0, 1};

  std::uint8_t length;
  char32_t cp;
  char32_t min_value;
  if ((b0 & 0xE0) == 0xC0) {
    length = 2;
    cp = b0 & 0x1F;
    min_value = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    length = 3;
    cp = b0 & 0x0F;
    min_value = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    length = 4;
    cp = b0 & 0x07;
    min_value = 0x10000;
  } else {
    return std::nullopt;
  }
  if (bytes.size() < length) return std::nullopt;
  for (std::size_t i = 1; i < length; ++i) {
    const auto b = static_cast<unsigned char>(bytes[i]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min_value || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return std::nullopt;
  }
  return Decoded{cp, length};
}

std::optional<std::size_t> find_invalid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    if (static_cast<unsigned char>(bytes[i]) < 0x80) {
      ++i;
      continue;
    }
    const auto d = decode_one(bytes.substr(i));
    if (!d) return i;
    i += d->length;
  }
  return std::nullopt;
}

std::size_t count_scalars(std::string_view bytes) {
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto d = decode_one(bytes.substr(i));
    i += d ? d->length : 1;
    ++count;
  }
  return count;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace optbpe::unicode
