#include "optbpe/oracle.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "optbpe/error.h"
#include "optbpe/optimal_segmenter.h"

namespace optbpe {
namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::string pieces(const Vocabulary& vocab, const Segmentation& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.token_ids.size(); ++i) {
    if (i > 0) out += ", ";
    out += '"';
    out += vocab.token_bytes(s.token_ids[i]);
    out += '"';
  }
  return out + "]";
}

}  // namespace

OracleCase random_oracle_case(std::mt19937_64& rng, const OracleOptions& options) {
  if (options.max_alphabet == 0 || options.max_alphabet > 26 ||
      options.max_vocab < options.max_alphabet || options.max_chunk == 0) {
    throw BoundError("oracle options out of range");
  }
  const std::size_t alphabet = pick(rng, 1, options.max_alphabet);
  OracleCase c;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < alphabet; ++i) {
    c.tokens.emplace_back(1, static_cast<char>('a' + i));
    seen.insert(c.tokens.back());
  }
  const std::size_t target = pick(rng, alphabet, options.max_vocab);
  // Bounded retries: tiny alphabets cannot always fill the vocabulary.
  for (std::size_t attempt = 0; c.tokens.size() < target && attempt < 200; ++attempt) {
    const std::size_t len = pick(rng, 2, std::max<std::size_t>(2, options.max_token));
    std::string t;
    for (std::size_t i = 0; i < len; ++i) t += static_cast<char>('a' + pick(rng, 0, alphabet - 1));
    if (seen.insert(t).second) c.tokens.push_back(std::move(t));
  }
  const std::size_t n = pick(rng, 1, options.max_chunk);
  for (std::size_t i = 0; i < n; ++i) c.chunk += static_cast<char>('a' + pick(rng, 0, alphabet - 1));
  return c;
}

std::string OracleMismatch::describe() const {
  const Vocabulary vocab = Vocabulary::from_tokens(input.tokens);
  std::ostringstream os;
  os << "case " << case_index << "\n";
  os << "vocabulary:";
  for (std::size_t i = 0; i < input.tokens.size(); ++i) os << ' ' << input.tokens[i] << '=' << i;
  os << "\nchunk: " << input.chunk << "\n";
  os << "expected (" << expected.count() << "): " << pieces(vocab, expected) << "\n";
  os << "actual   (" << actual.count() << "): " << pieces(vocab, actual) << "\n";
  return os.str();
}

OracleResult run_oracle(const OracleOptions& options, const Segmenter& segmenter) {
  const Segmenter run = segmenter ? segmenter
                                  : Segmenter([](const Vocabulary& v, const ReversedTrie& t,
                                                 std::string_view chunk) {
                                      return encode_optimal(v, t, chunk);
                                    });
  std::mt19937_64 rng(options.seed);
  OracleResult result;
  for (std::size_t i = 0; i < options.cases; ++i) {
    OracleCase c = random_oracle_case(rng, options);
    const Vocabulary vocab = Vocabulary::from_tokens(c.tokens);
    const ReversedTrie trie(vocab);
    const Segmentation expected = brute_force_min_segmentation(vocab, c.chunk, options.max_chunk);
    const Segmentation actual = run(vocab, trie, c.chunk);
    ++result.cases_run;
    if (actual.count() == expected.count()) ++result.count_matches;
    if (actual == expected) {
      ++result.id_matches;
    } else if (!result.first_mismatch) {
      result.first_mismatch = OracleMismatch{i, std::move(c), expected, actual};
    }
  }
  return result;
}

}  // namespace optbpe
