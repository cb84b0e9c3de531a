#include "optbpe/report.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "optbpe/error.h"

namespace optbpe {

using Json = nlohmann::ordered_json;

std::string_view report_format_name(ReportFormat format) {
  return format == ReportFormat::kJson ? "json" : "csv";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  throw LookupError("unknown format '" + std::string(text) + "' (expected json or csv)");
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

Json to_json(const LanguageReport& r, const EmitOptions& options) {
  Json j;
  j["language"] = r.language_tag;
  j["docs_processed"] = r.docs_processed;
  j["bytes_processed"] = r.bytes_processed;
  j["warnings"] = r.warnings;
  j["total_greedy_tokens"] = r.total_greedy_tokens;
  j["total_optimal_tokens"] = r.total_optimal_tokens;
  j["micro_tsr"] = optional_number(r.micro_tsr);
  j["macro_tsr"] = optional_number(r.macro_tsr);
  j["nonzero_tsr_percentage"] = optional_number(r.nonzero_tsr_percentage);

  Json buckets = Json::array();
  for (const WordLenBucket& b : r.wordlen_buckets) {
    buckets.push_back(Json{{"length", b.length},
                           {"word_count", b.word_count},
                           {"tsr_sum", b.tsr_sum},
                           {"mean_tsr", optional_number(b.mean_tsr())}});
  }
  j["wordlen_buckets"] = std::move(buckets);

  Json freq = Json::array();
  for (const auto& [len, count] : r.frequency) {
    freq.push_back(Json{{"length", len}, {"frequency", count}});
  }
  j["frequency"] = std::move(freq);

  const auto curve = [](const std::vector<ContextFitPoint>& points) {
    Json a = Json::array();
    for (const ContextFitPoint& p : points) {
      a.push_back(Json{{"k", p.k}, {"fit_percentage", p.fit_percentage}});
    }
    return a;
  };
  j["context_fit"] = Json{{"greedy", curve(r.context_fit_greedy)},
                          {"optimal", curve(r.context_fit_optimal)}};
  if (options.include_timing) j["elapsed_seconds"] = r.elapsed_seconds;

  const ReportMetadata& m = r.metadata;
  j["metadata"] = Json{{"tool_version", m.tool_version},
                       {"tier", m.tier},
                       {"pattern_hash", m.pattern_hash},
                       {"seed", m.seed},
                       {"metrics", m.metrics},
                       {"unit_mode", m.unit_mode},
                       {"length_unit", m.length_unit},
                       {"token_unit", m.token_unit},
                       {"document_boundary", m.document_boundary},
                       {"tsr_averaging", m.tsr_averaging},
                       {"context_window", m.context_window},
                       {"samples_per_k", m.samples_per_k},
                       {"context_fit_pool", m.context_fit_pool}};
  return j;
}

LanguageReport from_json(const Json& j) {
  LanguageReport r;
  r.language_tag = j.at("language").get<std::string>();
  r.docs_processed = j.at("docs_processed").get<std::size_t>();
  r.bytes_processed = j.at("bytes_processed").get<std::size_t>();
  r.warnings = j.at("warnings").get<std::size_t>();
  r.total_greedy_tokens = j.at("total_greedy_tokens").get<std::uint64_t>();
  r.total_optimal_tokens = j.at("total_optimal_tokens").get<std::uint64_t>();
  r.micro_tsr = read_optional(j.at("micro_tsr"));
  r.macro_tsr = read_optional(j.at("macro_tsr"));
  r.nonzero_tsr_percentage = read_optional(j.at("nonzero_tsr_percentage"));
  for (const Json& b : j.at("wordlen_buckets")) {
    r.wordlen_buckets.push_back({b.at("length").get<std::size_t>(),
                                 b.at("word_count").get<std::size_t>(),
                                 b.at("tsr_sum").get<double>()});
  }
  for (const Json& f : j.at("frequency")) {
    r.frequency.emplace_back(f.at("length").get<std::size_t>(),
                             f.at("frequency").get<std::size_t>());
  }
  const Json& fit = j.at("context_fit");
  for (const Json& p : fit.at("greedy")) {
    r.context_fit_greedy.push_back({p.at("k").get<std::size_t>(), p.at("fit_percentage").get<double>()});
  }
  for (const Json& p : fit.at("optimal")) {
    r.context_fit_optimal.push_back({p.at("k").get<std::size_t>(), p.at("fit_percentage").get<double>()});
  }
  if (j.contains("elapsed_seconds")) r.elapsed_seconds = j["elapsed_seconds"].get<double>();

  const Json& m = j.at("metadata");
  r.metadata.tool_version = m.at("tool_version").get<std::string>();
  r.metadata.tier = m.at("tier").get<std::string>();
  r.metadata.pattern_hash = m.at("pattern_hash").get<std::string>();
  r.metadata.seed = m.at("seed").get<std::uint64_t>();
  r.metadata.metrics = m.at("metrics").get<std::string>();
  r.metadata.unit_mode = m.at("unit_mode").get<std::string>();
  r.metadata.length_unit = m.at("length_unit").get<std::string>();
  r.metadata.token_unit = m.at("token_unit").get<std::string>();
  r.metadata.document_boundary = m.at("document_boundary").get<std::string>();
  r.metadata.tsr_averaging = m.at("tsr_averaging").get<std::string>();
  r.metadata.context_window = m.at("context_window").get<std::size_t>();
  r.metadata.samples_per_k = m.at("samples_per_k").get<std::size_t>();
  r.metadata.context_fit_pool = m.at("context_fit_pool").get<std::size_t>();
  return r;
}

}  // namespace

void write_json(std::span<const LanguageReport> reports, std::ostream& out,
                const EmitOptions& options) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["reports"] = Json::array();
  for (const LanguageReport& r : reports) doc["reports"].push_back(to_json(r, options));
  out << doc.dump(2) << '\n';
}

std::vector<LanguageReport> read_json(std::istream& in) {
  const Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ParseError(0, "report is not a JSON object");
  if (!doc.contains("schema_version") || doc["schema_version"] != kReportSchemaVersion) {
    throw ParseError(0, "unsupported report schema version");
  }
  std::vector<LanguageReport> out;
  try {
    for (const Json& r : doc.at("reports")) out.push_back(from_json(r));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed report: ") + e.what());
  }
  return out;
}

void write_tsr_csv(std::span<const LanguageReport> reports, std::ostream& out) {
  std::vector<const LanguageReport*> rows;
  for (const LanguageReport& r : reports) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const LanguageReport* a, const LanguageReport* b) {
    if (a->micro_tsr.has_value() != b->micro_tsr.has_value()) return a->micro_tsr.has_value();
    if (a->micro_tsr && *a->micro_tsr != *b->micro_tsr) return *a->micro_tsr > *b->micro_tsr;
    return a->language_tag < b->language_tag;
  });
  out << "language,docs,bytes,greedy_tokens,optimal_tokens,micro_tsr,macro_tsr,"
         "nonzero_tsr_pct,tier,pattern_hash,seed,unit_mode,tool_version\r\n";
  for (const LanguageReport* r : rows) {
    out << csv_field(r->language_tag) << ',' << r->docs_processed << ',' << r->bytes_processed
        << ',' << r->total_greedy_tokens << ',' << r->total_optimal_tokens << ','
        << optional_cell(r->micro_tsr) << ',' << optional_cell(r->macro_tsr) << ','
        << optional_cell(r->nonzero_tsr_percentage) << ',' << csv_field(r->metadata.tier) << ','
        << csv_field(r->metadata.pattern_hash) << ',' << r->metadata.seed << ','
        << csv_field(r->metadata.unit_mode) << ',' << csv_field(r->metadata.tool_version)
        << "\r\n";
  }
}

void write_wordlen_csv(std::span<const LanguageReport> reports, std::ostream& out) {
  out << "language,unit_mode,length,word_count,mean_tsr\r\n";
  for (const LanguageReport& r : reports) {
    for (const WordLenBucket& b : r.wordlen_buckets) {
      out << csv_field(r.language_tag) << ',' << csv_field(r.metadata.unit_mode) << ','
          << b.length << ',' << b.word_count << ',' << optional_cell(b.mean_tsr()) << "\r\n";
    }
  }
}

void write_frequency_csv(std::span<const LanguageReport> reports, std::ostream& out) {
  out << "language,length,frequency\r\n";
  for (const LanguageReport& r : reports) {
    for (const auto& [len, count] : r.frequency) {
      out << csv_field(r.language_tag) << ',' << len << ',' << count << "\r\n";
    }
  }
}

void write_context_fit_csv(std::span<const LanguageReport> reports, std::ostream& out) {
  out << "language,mode,k,context_window,fit_percentage\r\n";
  for (const LanguageReport& r : reports) {
    const auto rows = [&](const char* mode, const std::vector<ContextFitPoint>& points) {
      for (const ContextFitPoint& p : points) {
        out << csv_field(r.language_tag) << ',' << mode << ',' << p.k << ','
            << r.metadata.context_window << ',' << format_double(p.fit_percentage) << "\r\n";
      }
    };
    rows("greedy", r.context_fit_greedy);
    rows("optimal", r.context_fit_optimal);
  }
}

void emit_report(std::span<const LanguageReport> reports, ReportFormat format,
                 const std::filesystem::path& dest, const EmitOptions& options) {
  std::ofstream out(dest, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + dest.string());
  if (format == ReportFormat::kJson) {
    write_json(reports, out, options);
  } else {
    write_tsr_csv(reports, out);
  }
  out.flush();
  if (!out) throw IoError("write failed: " + dest.string());
}

}  // namespace optbpe
