#!/usr/bin/env python3
"""Regenerate the frozen test fixtures and the bundled sample corpus.

Requires tiktoken and regex. The reference encoders are built from the rank
files in --vocab-dir, so nothing is downloaded. The UDHR translations come
from the `udhr` npm package (declaration/*.html).

    python3 tools/make_fixtures.py --udhr-dir /path/to/udhr/declaration
"""

import argparse
import base64
import hashlib
import html
import json
import random
import re
from pathlib import Path

import regex
import tiktoken
import tiktoken.load
import tiktoken_ext.openai_public as public

ROOT = Path(__file__).resolve().parent.parent

TIERS = {"50k": "r50k_base", "100k": "cl100k_base", "200k": "o200k_base"}

GOLDEN_LANGUAGES = [
    "eng", "deu", "fra", "spa", "por", "ita", "nld", "pol", "ces", "hun",
    "ron", "swe", "dan", "tur", "fin", "est", "eus", "ind", "vie", "tgl",
    "swh", "zul", "yor", "hau", "rus", "ukr", "bul", "ell", "heb", "arb",
    "pes_1", "hin", "ben", "tam", "tel", "mar", "guj", "pan", "kan", "mal",
    "tha", "lao", "khm", "mya", "kat", "hye", "amh", "jpn", "kor", "cmn",
    "sin", "nep", "uig_arab", "khk",
]

SAMPLE_LANGUAGES = ["tur", "fin", "ind", "swh", "zul", "eus", "est"]

SYNTHETIC = [
    "",
    " ",
    "a",
    "a b",
    "policymakers",
    "Hello, world!",
    "line one\nline two",
    "windows\r\nline endings\r\n",
    "tabs\tand\t\tspaces   here",
    "trailing spaces   ",
    "   leading spaces",
    "\n\n\nblank lines\n\n",
    "numbers 1 12 123 1234 12345 3.14159 1,000,000",
    "I'm you're he's we'll they've she'd don't",
    "SHOUTING DON'T WON'T I'M",
    "ſtraße 'ſ 'S 'ſ",
    "emoji 😀🎉👍🏽 family 👨‍👩‍👧 flags 🇫🇮🇹🇷",
    "mixed中文English日本語한국어",
    "CamelCaseIdentifierName and snake_case_name",
    "URL https://example.com/path?query=1&x=y#frag",
    "code: for (int i = 0; i < n; ++i) { sum += a[i]; }",
    "punctuation!!! ??? ... --- *** ### @@@",
    "<|endoftext|> is plain text here",
    "mathematical ∑∫√∞ ≤≥≠ αβγδ",
    "combining é ä ñ and precomposed é ä ñ",
    "zero​width‌joiners‍",
    "nbsp between words",
    "ideographic　space",
    "Ⅻ roman numeral ½ fraction ² superscript",
    "ǅungla ǈudi Ǆ titlecase",
    "arabic numerals ٠١٢٣٤٥ devanagari ०१२३",
    "'quoted' \"double\" «guillemets» „low“",
    "a\u0000nul",
    "x" * 300,
    "ab" * 150,
    " " * 40 + "deep indent",
    "1234567890" * 5,
    "yükselme katacaklarından fotosynteesille",
    "vicharshil prachinakal skyscanner dataprojektori",
    "\t\n \r\n\u000b\u000c\u0085  ",
]


def load_encoders(vocab_dir):
    def read_local(blobpath, expected_hash=None):
        data = (vocab_dir / blobpath.rsplit("/", 1)[-1]).read_bytes()
        if expected_hash and hashlib.sha256(data).hexdigest() != expected_hash:
            raise SystemExit(f"hash mismatch for {blobpath}")
        return data

    tiktoken.load.read_file_cached = read_local
    encoders = {}
    for tier, name in TIERS.items():
        params = getattr(public, name)()
        encoders[tier] = tiktoken.Encoding(
            name=name,
            pat_str=params["pat_str"],
            mergeable_ranks=params["mergeable_ranks"],
            special_tokens=params["special_tokens"],
        )
    return encoders


def udhr_paragraphs(udhr_dir, iso):
    named = udhr_dir / f"{iso}.html"
    candidates = [named] if named.exists() else sorted(udhr_dir.glob("*.html"))
    for path in candidates:
        head = path.read_text(encoding="utf-8")[:400]
        if path != named and f'data-iso6393="{iso}"' not in head:
            continue
        text = path.read_text(encoding="utf-8")
        out = []
        for m in re.finditer(r"<(p|h\d|li)[^>]*>(.*?)</\1>", text, re.S):
            para = html.unescape(re.sub(r"<[^>]+>", "", m.group(2)))
            para = " ".join(para.split())
            if para:
                out.append(para)
        if out:
            return out
    raise SystemExit(f"no UDHR translation for {iso}")


def optimal_pieces(ranks, data):
    n = len(data)
    inf = n + 1
    dp = [0] + [inf] * n
    par = [-1] * (n + 1)
    for i in range(1, n + 1):
        for j in range(i - 1, -1, -1):
            if data[j:i] in ranks and dp[j] + 1 < dp[i]:
                dp[i] = dp[j] + 1
                par[i] = j
    pieces = []
    k = n
    while k > 0:
        pieces.append(data[par[k]:k])
        k = par[k]
    return pieces[::-1]


def pretokens(enc, text):
    out = [m.group(0) for m in regex.finditer(enc._pat_str, text)]
    assert "".join(out) == text
    return out


def counts(enc, text):
    ranks = enc._mergeable_ranks
    greedy = optimal = 0
    for chunk in pretokens(enc, text):
        data = chunk.encode("utf-8")
        greedy += len(enc._encode_single_piece(data))
        optimal += len(optimal_pieces(ranks, data))
    return greedy, optimal


def golden(encoders, udhr_dir, total):
    rng = random.Random(20240611)
    lines = list(SYNTHETIC)
    per_language = (total - len(lines)) // len(GOLDEN_LANGUAGES) + 1
    for iso in GOLDEN_LANGUAGES:
        paras = [p for p in udhr_paragraphs(udhr_dir, iso) if len(p) <= 600]
        rng.shuffle(paras)
        lines.extend(paras[:per_language])
    lines = lines[:total]
    records = []
    for text in lines:
        rec = {"text": text, "ids": {}, "pretoken_lengths": {}, "counts": {}}
        for tier, enc in encoders.items():
            rec["ids"][tier] = enc.encode(text, disallowed_special=())
            rec["pretoken_lengths"][tier] = [len(p.encode("utf-8")) for p in pretokens(enc, text)]
            g, o = counts(enc, text)
            assert g == len(rec["ids"][tier])
            rec["counts"][tier] = {"greedy": g, "optimal": o}
        records.append(rec)
    return records


PUBLISHED_EXAMPLES = [
    ("English", "policymakers", "p olic ym akers", "policy makers", 50),
    ("English", "skyscanner", "sk ys canner", "sky scanner", 33),
    ("Indonesian", "mungkinkah", "mung kink ah", "mungkin kah", 33),
    ("Turkish", "yükselme", "y ü ks el me", "yük sel me", 40),
    ("Turkish", "katacaklarından", "k ata c ak ları nd an", "kat acak ların dan", 43),
    ("Finnish", "fotosynteesille", "f otos y nt ees ille", "foto syn tees ille", 33),
    ("Finnish", "dataprojektori", "dat apro j ek tor", "data proj ekt ori", 33),
    ("Telugu", "Sangarshana", "Sang arsh ana", "Sangars hana", 33),
    ("Telugu", "Malligadu", "Mall igad u", "Malliga du", 33),
    ("Tamil", "puriyavillai", "puri yav illai", "puriya villai", 33),
    ("Tamil", "yendravudan", "yend rav udan", "yendra vudan", 33),
    ("Hindi", "vicharshil", "v ich ar sh il", "vi chars hil", 40),
    ("Hindi", "prachinakal", "pr ach in ak al", "pra china kal", 40),
]


def pct(g, o):
    return (200 * (g - o) + g) // (2 * g)


def published_examples(encoders):
    rows = []
    for language, word, greedy, optimal, tsr in PUBLISHED_EXAMPLES:
        row = {
            "language": language,
            "word": word,
            "listed_greedy": greedy.split(),
            "listed_optimal": optimal.split(),
            "listed_tsr_percent": tsr,
            "status": "unreproducible",
            "tiers": {},
        }
        for tier, enc in encoders.items():
            data = word.encode("utf-8")
            g = [enc.decode_single_token_bytes(t).decode("utf-8", "replace")
                 for t in enc._encode_single_piece(data)]
            o = [p.decode("utf-8", "replace") for p in optimal_pieces(enc._mergeable_ranks, data)]
            row["tiers"][tier] = {"greedy": g, "optimal": o}
        for status, match in (
            ("exact", lambda m: m["greedy"] == row["listed_greedy"]
             and m["optimal"] == row["listed_optimal"]),
            ("counts", lambda m: m["optimal"] == row["listed_optimal"]
             and pct(len(m["greedy"]), len(m["optimal"])) == tsr),
        ):
            hit = next((t for t in ("100k", "200k", "50k") if match(row["tiers"][t])), None)
            if hit:
                row["status"] = status
                row["tier"] = hit
                m = row["tiers"][hit]
                row["greedy_count"] = len(m["greedy"])
                row["optimal_count"] = len(m["optimal"])
                break
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--udhr-dir", type=Path, required=True)
    ap.add_argument("--vocab-dir", type=Path, default=ROOT / "data" / "vocab")
    ap.add_argument("--fixtures", type=Path, default=ROOT / "tests" / "fixtures")
    ap.add_argument("--sample", type=Path, default=ROOT / "data" / "sample")
    args = ap.parse_args()

    encoders = load_encoders(args.vocab_dir)
    args.fixtures.mkdir(parents=True, exist_ok=True)
    args.sample.mkdir(parents=True, exist_ok=True)

    with open(args.fixtures / "golden_multilingual.jsonl", "w", encoding="utf-8") as f:
        for rec in golden(encoders, args.udhr_dir, 500):
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    with open(args.fixtures / "published_examples.json", "w", encoding="utf-8") as f:
        json.dump(published_examples(encoders), f, ensure_ascii=False, indent=1)
        f.write("\n")

    turkish = udhr_paragraphs(args.udhr_dir, "tur")[3]
    g, o = counts(encoders["50k"], turkish)
    pre = {}
    for tier, enc in encoders.items():
        pre[tier] = {s: pretokens(enc, s) for s in ("policymakers", "a b")}
    first = (args.vocab_dir / "r50k_base.tiktoken").read_text().split("\n", 1)[0].split()
    spot = {
        "turkish_document": {"tier": "50k", "text": turkish, "greedy": g, "optimal": o},
        "pretokens": pre,
        "r50k_first_line": {"bytes_hex": base64_hex(first[0]), "rank": int(first[1])},
        "rank_file_sha256": {
            name: hashlib.sha256((args.vocab_dir / f"{name}.tiktoken").read_bytes()).hexdigest()
            for name in TIERS.values()
        },
        "rank_file_lines": {
            tier: len(enc._mergeable_ranks) for tier, enc in encoders.items()
        },
    }
    with open(args.fixtures / "spot_checks.json", "w", encoding="utf-8") as f:
        json.dump(spot, f, ensure_ascii=False, indent=1)
        f.write("\n")

    with open(args.fixtures / "english.txt", "w", encoding="utf-8") as f:
        for para in udhr_paragraphs(args.udhr_dir, "eng"):
            f.write(para + "\n")

    for iso in SAMPLE_LANGUAGES:
        with open(args.sample / f"{iso}.txt", "w", encoding="utf-8") as f:
            for para in udhr_paragraphs(args.udhr_dir, iso):
                f.write(para + "\n")


def base64_hex(token):
    return base64.b64decode(token).hex()


if __name__ == "__main__":
    main()
