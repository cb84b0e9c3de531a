#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.inc.

The pre-tokenizer classes code points the same way the reference regex
engine does, so the table is pinned to Unicode 16.0:

    pip install "unicodedata2==16.0.0"
    python3 tools/gen_unicode_tables.py > core/src/unicode_tables.inc
"""

import sys

import unicodedata2 as ud

CLASSES = {
    "Lu": "kUppercaseLetter",
    "Ll": "kLowercaseLetter",
    "Lt": "kTitlecaseLetter",
    "Lm": "kModifierLetter",
    "Lo": "kOtherLetter",
    "Mn": "kMark",
    "Mc": "kMark",
    "Me": "kMark",
    "Nd": "kNumber",
    "Nl": "kNumber",
    "No": "kNumber",
}


def main() -> None:
    if ud.unidata_version != "16.0.0":
        sys.exit(f"expected unicodedata2 16.0.0, found {ud.unidata_version}")

    ranges = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        cls = CLASSES.get(ud.category(chr(cp)))
        if cls is None:
            continue
        if ranges and ranges[-1][2] == cls and ranges[-1][1] == cp - 1:
            ranges[-1][1] = cp
        else:
            ranges.append([cp, cp, cls])

    out = sys.stdout
    out.write("// Generated by tools/gen_unicode_tables.py from Unicode "
              f"{ud.unidata_version}. Do not edit.\n")
    out.write("// Code points not covered by a range are CodepointClass::kOther.\n\n")
    out.write(f"inline constexpr std::size_t kClassRangeCount = {len(ranges)};\n\n")
    out.write("inline constexpr ClassRange kClassRanges[kClassRangeCount] = {\n")
    for first, last, cls in ranges:
        out.write(f"    {{0x{first:04X}, 0x{last:04X}, CodepointClass::{cls}}},\n")
    out.write("};\n")


if __name__ == "__main__":
    main()
