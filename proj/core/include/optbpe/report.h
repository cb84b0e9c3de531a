#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optbpe/corpus_analyzer.h"

namespace optbpe {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { kJson, kCsv };

std::string_view report_format_name(ReportFormat format);
ReportFormat parse_report_format(std::string_view text);  // "json" | "csv"

struct EmitOptions {
  // Wall time differs run to run, so it is left out unless asked for; the
  // rest of a report is byte-stable for fixed input, tier and seed.
  bool include_timing = false;
};

// JSON document:
//   {"schema_version": 1, "reports": [ {...}, ... ]}
// Reports appear in the given order.
void write_json(std::span<const LanguageReport> reports, std::ostream& out,
                const EmitOptions& options = {});
// Inverse of write_json. Throws ParseError on malformed input or an
// unsupported schema version.
std::vector<LanguageReport> read_json(std::istream& in);

// Per-language summary, one row per report, sorted by micro_tsr descending
// (null last, then by language tag). Header:
//   language,docs,bytes,greedy_tokens,optimal_tokens,micro_tsr,macro_tsr,
//   nonzero_tsr_pct,tier,pattern_hash,seed,unit_mode,tool_version
// RFC 4180 quoting; empty cells for null values.
void write_tsr_csv(std::span<const LanguageReport> reports, std::ostream& out);

// language,unit_mode,length,word_count,mean_tsr
void write_wordlen_csv(std::span<const LanguageReport> reports, std::ostream& out);
// language,length,frequency
void write_frequency_csv(std::span<const LanguageReport> reports, std::ostream& out);
// language,mode,k,context_window,fit_percentage
void write_context_fit_csv(std::span<const LanguageReport> reports, std::ostream& out);

// Writes the JSON document or the per-language CSV to `dest`. Throws
// IoError if the file cannot be written.
void emit_report(std::span<const LanguageReport> reports, ReportFormat format,
                 const std::filesystem::path& dest, const EmitOptions& options = {});

// Field with RFC 4180 quoting applied when needed.
std::string csv_field(std::string_view text);
// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

}  // namespace optbpe
