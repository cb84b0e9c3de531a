#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optbpe/tokenizer.h"

namespace optbpe {

// Token saving ratio (base - alt) / base, kept as exact integers.
class TokenSavingRatio {
 public:
  // Throws UndefinedMetricError when either count is zero.
  TokenSavingRatio(std::size_t base_count, std::size_t alt_count);

  std::size_t base() const { return base_; }
  std::size_t alt() const { return alt_; }
  // Negative when alt > base.
  std::int64_t saved() const {
    return static_cast<std::int64_t>(base_) - static_cast<std::int64_t>(alt_);
  }

  // Correctly rounded quotient of two exact integers.
  double value() const {
    return static_cast<double>(saved()) / static_cast<double>(base_);
  }
  bool positive() const { return alt_ < base_; }

  friend bool operator==(const TokenSavingRatio& a, const TokenSavingRatio& b) {
    return a.saved() * static_cast<std::int64_t>(b.base_) ==
           b.saved() * static_cast<std::int64_t>(a.base_);
  }
  friend std::strong_ordering operator<=>(const TokenSavingRatio& a, const TokenSavingRatio& b) {
    return a.saved() * static_cast<std::int64_t>(b.base_) <=>
           b.saved() * static_cast<std::int64_t>(a.base_);
  }

 private:
  std::size_t base_;
  std::size_t alt_;
};

TokenSavingRatio tsr(std::size_t base_count, std::size_t alt_count);

struct TsrRecord {
  std::string doc_id;
  std::size_t tokens_greedy = 0;
  std::size_t tokens_optimal = 0;
  TokenSavingRatio tsr;
};

// Greedy is the baseline; optimal is the alternative. Throws
// UndefinedMetricError for documents that produce no tokens.
TsrRecord document_tsr(const Tokenizer& tokenizer, std::string_view doc,
                       std::string doc_id = {});

struct NonzeroSplit {
  std::vector<TsrRecord> subset;
  double percentage = 0.0;  // 100 * |subset| / |records|; 0 for no records
};

NonzeroSplit nonzero_tsr_split(std::span<const TsrRecord> records);

// What counts as a "word" for the length analyses.
enum class UnitMode {
  kPretoken,        // each pre-token with a non-space scalar; length excludes
                    // leading whitespace, TSR covers the whole pre-token
  kWhitespaceWord,  // maximal runs of non-whitespace scalars, each
                    // pre-tokenized and segmented on its own
};

std::string_view unit_mode_name(UnitMode mode);
UnitMode parse_unit_mode(std::string_view text);  // "pretoken" | "whitespace-word"

// Length in Unicode scalar values; counts are tokens.
struct UnitCounts {
  std::size_t length = 0;
  std::size_t greedy = 0;
  std::size_t optimal = 0;
};

std::vector<UnitCounts> unit_counts(const Tokenizer& tokenizer, std::string_view doc,
                                    UnitMode mode);

// Maximal non-whitespace runs of `doc`.
std::vector<std::string_view> whitespace_words(std::string_view doc);

struct WordLenBucket {
  std::size_t length = 0;  // scalar values
  std::size_t word_count = 0;
  double tsr_sum = 0.0;

  std::optional<double> mean_tsr() const {
    if (word_count == 0) return std::nullopt;
    return tsr_sum / static_cast<double>(word_count);
  }
};

// Running per-length mean of unit TSR. Units must be added in a fixed order
// for bit-identical sums.
class WordLengthTsrProfile {
 public:
  void add(const UnitCounts& unit);
  std::vector<WordLenBucket> buckets() const;

 private:
  std::map<std::size_t, WordLenBucket> buckets_;
};

std::vector<WordLenBucket> wordlen_tsr_profile(const Tokenizer& tokenizer,
                                               std::span<const std::string> corpus,
                                               UnitMode mode);

// (length, frequency) pairs, ascending by length, over whitespace words.
class WordLengthHistogram {
 public:
  void add_document(std::string_view doc);
  void add(std::size_t length) { ++counts_[length]; }
  std::vector<std::pair<std::size_t, std::size_t>> entries() const;

 private:
  std::map<std::size_t, std::size_t> counts_;
};

std::vector<std::pair<std::size_t, std::size_t>> wordlen_frequency_profile(
    std::span<const std::string> corpus);

struct ContextFitOptions {
  std::size_t context_window = 1024;
  // Values of k to evaluate. Values above the number of examples are skipped.
  std::vector<std::size_t> ks;
  std::size_t samples_per_k = 1000;
  std::uint64_t seed = 0;
};

struct ContextFitPoint {
  std::size_t k = 0;
  double fit_percentage = 0.0;

  friend bool operator==(const ContextFitPoint&, const ContextFitPoint&) = default;
};

// For each k, draws `samples_per_k` sets of k distinct examples and reports
// the percentage whose summed token count is at most the window. The draws
// depend only on (seed, k, number of examples), so two count vectors of the
// same length see identical example sets.
std::vector<ContextFitPoint> context_fit_profile(std::span<const std::size_t> example_tokens,
                                                 const ContextFitOptions& options);

std::vector<ContextFitPoint> context_fit_profile(const Tokenizer& tokenizer,
                                                 std::span<const std::string> examples,
                                                 const ContextFitOptions& options, Mode mode);

}  // namespace optbpe
