#include "optbpe/corpus_analyzer.h"

#include <chrono>
#include <cstdio>
#include <exception>
#include <iterator>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "optbpe/error.h"
#include "optbpe/unicode.h"
#include "random_util.h"

#ifndef OPTBPE_VERSION
#define OPTBPE_VERSION "0.0.0"
#endif

namespace optbpe {

std::string tool_version() { return OPTBPE_VERSION; }

std::string_view corpus_format_name(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kPlainLines: return "plain-lines";
    case CorpusFormat::kJsonLines: return "json-lines";
    case CorpusFormat::kRawFile: return "raw-file";
  }
  return "plain-lines";
}

CorpusFormat parse_corpus_format(std::string_view text) {
  if (text == "plain-lines") return CorpusFormat::kPlainLines;
  if (text == "json-lines") return CorpusFormat::kJsonLines;
  if (text == "raw-file") return CorpusFormat::kRawFile;
  throw LookupError("unknown corpus format '" + std::string(text) +
                    "' (expected plain-lines, json-lines or raw-file)");
}

DocumentReader::DocumentReader(CorpusSource source)
    : source_(std::move(source)), in_(source_.path, std::ios::binary) {
  if (!in_) throw IoError("cannot open corpus file: " + source_.path.string());
}

bool DocumentReader::limits_reached() const {
  if (source_.max_docs && docs_ >= *source_.max_docs) return true;
  if (source_.max_bytes && bytes_ >= *source_.max_bytes) return true;
  return false;
}

bool DocumentReader::next(Document& doc) {
  if (limits_reached()) return false;

  if (source_.format == CorpusFormat::kRawFile) {
    if (raw_done_) return false;
    raw_done_ = true;
    std::string text{std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>()};
    if (in_.bad()) throw IoError("read failed: " + source_.path.string());
    if (source_.max_bytes && text.size() > *source_.max_bytes) {
      std::size_t cut = *source_.max_bytes;
      // Back off to a scalar boundary so the cut never splits a sequence.
      while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
      text.resize(cut);
    }
    if (text.empty()) return false;
    doc.index = docs_++;
    doc.line = 1;
    bytes_ += text.size();
    doc.text = std::move(text);
    return true;
  }

  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::string text;
    if (source_.format == CorpusFormat::kPlainLines) {
      text = std::move(line);
    } else {
      const nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
      std::string problem;
      if (record.is_discarded()) {
        problem = "malformed JSON";
      } else if (!record.is_object() || !record.contains(source_.text_field)) {
        problem = "missing field '" + source_.text_field + "'";
      } else if (!record[source_.text_field].is_string()) {
        problem = "field '" + source_.text_field + "' is not a string";
      } else {
        text = record[source_.text_field].get<std::string>();
        if (text.empty()) problem = "empty text";
      }
      if (!problem.empty()) {
        if (source_.fail_fast) throw ParseError(line_, problem);
        ++warnings_;
        if (messages_.size() < 100) {
          messages_.push_back(source_.path.string() + ":" + std::to_string(line_) + ": " +
                              problem);
        }
        continue;
      }
    }

    if (source_.max_bytes && bytes_ + text.size() > *source_.max_bytes) {
      bytes_ = *source_.max_bytes;
      return false;
    }
    doc.index = docs_++;
    doc.line = line_;
    bytes_ += text.size();
    doc.text = std::move(text);
    return true;
  }
  if (in_.bad()) throw IoError("read failed: " + source_.path.string());
  return false;
}

std::vector<std::string> read_documents(const CorpusSource& source) {
  DocumentReader reader(source);
  std::vector<std::string> docs;
  Document doc;
  while (reader.next(doc)) docs.push_back(std::move(doc.text));
  return docs;
}

unsigned parse_metrics(std::string_view text) {
  unsigned out = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    if (item == "tsr") {
      out |= kMetricTsr;
    } else if (item == "wordlen") {
      out |= kMetricWordLength;
    } else if (item == "freq") {
      out |= kMetricFrequency;
    } else if (item == "context-fit") {
      out |= kMetricContextFit;
    } else if (item == "all") {
      out |= kMetricAll;
    } else {
      throw LookupError("unknown metric '" + std::string(item) +
                        "' (expected tsr, wordlen, freq, context-fit or all)");
    }
    pos = comma + 1;
  }
  return out;
}

std::string metrics_string(unsigned metrics) {
  std::string out;
  const auto add = [&](unsigned flag, const char* name) {
    if ((metrics & flag) == 0) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(kMetricTsr, "tsr");
  add(kMetricWordLength, "wordlen");
  add(kMetricFrequency, "freq");
  add(kMetricContextFit, "context-fit");
  return out;
}

namespace {

struct DocResult {
  std::size_t greedy = 0;
  std::size_t optimal = 0;
  std::vector<UnitCounts> units;
  std::vector<std::size_t> word_lengths;
  std::exception_ptr error;
};

void process(const Tokenizer& tokenizer, const AnalysisOptions& options, const Document& doc,
             DocResult& out) {
  try {
    const Tokenizer::Counts c = tokenizer.count_both(doc.text);
    out.greedy = c.greedy;
    out.optimal = c.optimal;
    if (options.metrics & kMetricWordLength) {
      out.units = unit_counts(tokenizer, doc.text, options.unit_mode);
    }
    if (options.metrics & kMetricFrequency) {
      for (const std::string_view w : whitespace_words(doc.text)) {
        out.word_lengths.push_back(unicode::count_scalars(w));
      }
    }
  } catch (...) {
    out.error = std::current_exception();
  }
}

std::string document_boundary(const CorpusSource& source) {
  switch (source.format) {
    case CorpusFormat::kPlainLines: return "one document per non-empty line";
    case CorpusFormat::kJsonLines:
      return "one document per JSON record, text field '" + source.text_field + "'";
    case CorpusFormat::kRawFile: return "whole file is one document";
  }
  return {};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

LanguageReport analyze(const CorpusSource& source, const Tokenizer& tokenizer,
                       const AnalysisOptions& options) {
  const auto started = std::chrono::steady_clock::now();

  LanguageReport report;
  report.language_tag = source.language_tag;
  ReportMetadata& meta = report.metadata;
  meta.tool_version = tool_version();
  meta.tier = tokenizer.config().tier() ? std::string(tier_name(*tokenizer.config().tier()))
                                        : std::string("custom");
  meta.pattern_hash = hex64(tokenizer.config().pattern_hash());
  meta.seed = options.seed;
  meta.metrics = metrics_string(options.metrics);
  meta.unit_mode = std::string(unit_mode_name(options.unit_mode));
  meta.document_boundary = document_boundary(source);
  if (options.metrics & kMetricContextFit) {
    meta.context_window = options.context_fit.context_window;
    meta.samples_per_k = options.context_fit.samples_per_k;
    meta.context_fit_pool = options.context_fit_pool;
  }

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size) * threads;

  DocumentReader reader(source);
  WordLengthTsrProfile profile;
  WordLengthHistogram histogram;
  std::size_t nonzero = 0;
  double macro_sum = 0.0;

  std::mt19937_64 reservoir_rng(detail::splitmix64(options.seed ^ 0x5EED));
  std::vector<std::size_t> pool_greedy;
  std::vector<std::size_t> pool_optimal;

  std::vector<Document> docs(batch);
  std::vector<DocResult> results(batch);
  for (;;) {
    std::size_t filled = 0;
    while (filled < batch && reader.next(docs[filled])) ++filled;
    if (filled == 0) break;

    for (std::size_t i = 0; i < filled; ++i) results[i] = DocResult{};
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, filled));
    if (workers <= 1) {
      for (std::size_t i = 0; i < filled; ++i) process(tokenizer, options, docs[i], results[i]);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < filled; i += workers) {
            process(tokenizer, options, docs[i], results[i]);
          }
        });
      }
      for (std::thread& t : pool) t.join();
    }

    for (std::size_t i = 0; i < filled; ++i) {
      DocResult& r = results[i];
      if (r.error) {
        try {
          std::rethrow_exception(r.error);
        } catch (const ConsistencyError&) {
          throw;
        } catch (const Error& e) {
          throw Error(source.path.string() + ":" + std::to_string(docs[i].line) + ": " +
                      e.what());
        }
      }
      ++report.docs_processed;
      report.total_greedy_tokens += r.greedy;
      report.total_optimal_tokens += r.optimal;
      if (r.greedy > 0) {
        const TokenSavingRatio t = tsr(r.greedy, r.optimal);
        macro_sum += t.value();
        if (t.positive()) ++nonzero;
      }
      for (const UnitCounts& u : r.units) profile.add(u);
      for (const std::size_t len : r.word_lengths) histogram.add(len);

      if (options.metrics & kMetricContextFit && options.context_fit_pool > 0) {
        const std::size_t seen = report.docs_processed;
        if (pool_greedy.size() < options.context_fit_pool) {
          pool_greedy.push_back(r.greedy);
          pool_optimal.push_back(r.optimal);
        } else {
          const std::uint64_t slot = detail::draw_below(reservoir_rng, seen);
          if (slot < options.context_fit_pool) {
            pool_greedy[slot] = r.greedy;
            pool_optimal[slot] = r.optimal;
          }
        }
      }
    }
  }

  report.bytes_processed = reader.bytes_read();
  report.warnings = reader.warnings();

  if (options.metrics & kMetricTsr && report.total_greedy_tokens > 0) {
    report.micro_tsr = tsr(report.total_greedy_tokens, report.total_optimal_tokens).value();
    report.macro_tsr = macro_sum / static_cast<double>(report.docs_processed);
    report.nonzero_tsr_percentage =
        100.0 * static_cast<double>(nonzero) / static_cast<double>(report.docs_processed);
  }
  if (options.metrics & kMetricWordLength) report.wordlen_buckets = profile.buckets();
  if (options.metrics & kMetricFrequency) report.frequency = histogram.entries();
  if (options.metrics & kMetricContextFit) {
    ContextFitOptions fit = options.context_fit;
    fit.seed = options.seed;
    report.context_fit_greedy = context_fit_profile(pool_greedy, fit);
    report.context_fit_optimal = context_fit_profile(pool_optimal, fit);
  }

  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace optbpe
