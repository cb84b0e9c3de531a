#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "optbpe/reversed_trie.h"
#include "optbpe/segmentation.h"
#include "optbpe/vocabulary.h"

namespace optbpe {

// Randomized check of a segmenter against brute_force_min_segmentation on
// small alphabets where exhaustive search is cheap.
struct OracleOptions {
  std::uint64_t seed = 0;
  std::size_t cases = 10000;
  std::size_t max_alphabet = 4;
  std::size_t max_vocab = 30;   // includes every alphabet symbol
  std::size_t max_chunk = 12;   // bytes
  std::size_t max_token = 5;    // longest multi-symbol token drawn
};

struct OracleCase {
  std::vector<std::string> tokens;  // token i has rank i
  std::string chunk;
};

using Segmenter =
    std::function<Segmentation(const Vocabulary&, const ReversedTrie&, std::string_view)>;

struct OracleMismatch {
  std::size_t case_index = 0;
  OracleCase input;
  Segmentation expected;
  Segmentation actual;

  // Vocabulary, chunk and both segmentations, one item per line.
  std::string describe() const;
};

struct OracleResult {
  std::size_t cases_run = 0;
  std::size_t count_matches = 0;
  std::size_t id_matches = 0;
  std::optional<OracleMismatch> first_mismatch;

  bool passed() const { return id_matches == cases_run; }
};

OracleCase random_oracle_case(std::mt19937_64& rng, const OracleOptions& options);

// Defaults to encode_optimal.
OracleResult run_oracle(const OracleOptions& options, const Segmenter& segmenter = {});

}  // namespace optbpe
