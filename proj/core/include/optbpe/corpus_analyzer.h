#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "optbpe/metrics.h"
#include "optbpe/tokenizer.h"

namespace optbpe {

enum class CorpusFormat {
  kPlainLines,  // one document per line; blank lines skipped
  kJsonLines,   // one JSON object per line, text under `text_field`
  kRawFile,     // the whole file is one document
};

std::string_view corpus_format_name(CorpusFormat format);
// "plain-lines" | "json-lines" | "raw-file". Throws LookupError.
CorpusFormat parse_corpus_format(std::string_view text);

struct CorpusSource {
  std::filesystem::path path;
  CorpusFormat format = CorpusFormat::kPlainLines;
  std::string text_field = "text";
  std::string language_tag;
  std::optional<std::size_t> max_docs;
  // Documents are taken while the running byte total stays within the limit.
  std::optional<std::size_t> max_bytes;
  // Throw ParseError on the first malformed json-lines record instead of
  // skipping it.
  bool fail_fast = false;
};

struct Document {
  std::size_t index = 0;  // 0-based position among emitted documents
  std::size_t line = 0;   // 1-based source line (1 for raw files)
  std::string text;
};

// Lazy document stream over a CorpusSource. Only the current line is held
// in memory for the line-based formats.
class DocumentReader {
 public:
  // Throws IoError if the file cannot be opened.
  explicit DocumentReader(CorpusSource source);

  // Fills `doc` and returns true, or returns false at end of input or once a
  // limit is reached.
  bool next(Document& doc);

  std::size_t documents_read() const { return docs_; }
  std::size_t bytes_read() const { return bytes_; }
  std::size_t warnings() const { return warnings_; }
  // Human-readable description of each skipped record, capped at 100.
  const std::vector<std::string>& warning_messages() const { return messages_; }

 private:
  bool limits_reached() const;

  CorpusSource source_;
  std::ifstream in_;
  std::size_t line_ = 0;
  std::size_t docs_ = 0;
  std::size_t bytes_ = 0;
  std::size_t warnings_ = 0;
  std::vector<std::string> messages_;
  bool raw_done_ = false;
};

// Reads every document. Convenience for small corpora and tests.
std::vector<std::string> read_documents(const CorpusSource& source);

enum MetricFlags : unsigned {
  kMetricTsr = 1u << 0,          // token totals, micro/macro TSR, non-zero split
  kMetricWordLength = 1u << 1,   // per-length mean TSR
  kMetricFrequency = 1u << 2,    // word-length histogram
  kMetricContextFit = 1u << 3,   // fit curves for both modes
  kMetricAll = 0xFu,
};

// Comma-separated list of tsr, wordlen, freq, context-fit or all.
unsigned parse_metrics(std::string_view text);
std::string metrics_string(unsigned metrics);

struct AnalysisOptions {
  unsigned metrics = kMetricAll;
  UnitMode unit_mode = UnitMode::kWhitespaceWord;
  // 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  std::size_t batch_size = 512;
  std::uint64_t seed = 0;
  ContextFitOptions context_fit{1024, {1, 2, 4, 8, 16, 32}, 1000, 0};
  // Documents kept for context-fit sampling, chosen by seeded reservoir
  // sampling so memory stays bounded on large corpora.
  std::size_t context_fit_pool = 10000;
};

struct ReportMetadata {
  std::string tool_version;
  std::string tier;           // "50k", "100k", "200k" or "custom"
  std::string pattern_hash;   // 16 hex digits
  std::uint64_t seed = 0;
  std::string metrics;
  std::string unit_mode;
  std::string length_unit = "unicode scalar values";
  std::string token_unit = "byte-level BPE tokens";
  std::string document_boundary;
  std::string tsr_averaging = "micro: summed counts; macro: mean of per-document ratios";
  std::size_t context_window = 0;
  std::size_t samples_per_k = 0;
  std::size_t context_fit_pool = 0;

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct LanguageReport {
  std::string language_tag;
  std::size_t docs_processed = 0;
  std::size_t bytes_processed = 0;
  std::size_t warnings = 0;
  std::uint64_t total_greedy_tokens = 0;
  std::uint64_t total_optimal_tokens = 0;
  std::optional<double> micro_tsr;  // null when no tokens
  std::optional<double> macro_tsr;
  std::optional<double> nonzero_tsr_percentage;
  std::vector<WordLenBucket> wordlen_buckets;
  std::vector<std::pair<std::size_t, std::size_t>> frequency;
  std::vector<ContextFitPoint> context_fit_greedy;
  std::vector<ContextFitPoint> context_fit_optimal;
  double elapsed_seconds = 0.0;
  ReportMetadata metadata;
};

// Streams `source` through both segmenters. Workers process batches of
// documents in parallel; results are folded in document order, so the
// report does not depend on the thread count.
LanguageReport analyze(const CorpusSource& source, const Tokenizer& tokenizer,
                       const AnalysisOptions& options = {});

std::string tool_version();

}  // namespace optbpe
