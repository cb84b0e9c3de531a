#include "cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "optbpe/corpus_analyzer.h"
#include "optbpe/error.h"
#include "optbpe/metrics.h"
#include "optbpe/oracle.h"
#include "optbpe/report.h"
#include "optbpe/tokenizer.h"
#include "optbpe/unicode.h"

namespace optbpe::cli {
namespace {

namespace fs = std::filesystem;

struct VocabOptions {
  std::string tier = "100k";
  std::string vocab_dir;
  std::string rank_file;
  std::string pretokenizer_config;
  bool allow_special = false;
};

void add_vocab_options(CLI::App& cmd, VocabOptions& o) {
  cmd.add_option("--tier", o.tier, "Vocabulary tier: 50k, 100k or 200k")
      ->check(CLI::IsMember({"50k", "100k", "200k", "r50k_base", "cl100k_base", "o200k_base"},
                            CLI::ignore_case))
      ->capture_default_str();
  cmd.add_option("--vocab-dir", o.vocab_dir,
                 std::string("Directory holding the tier rank files (default: $") + kVocabDirEnv +
                     ")");
  cmd.add_option("--vocab", o.rank_file, "Explicit rank file; overrides --vocab-dir");
  cmd.add_option("--pretokenizer-config", o.pretokenizer_config,
                 "Key-value file selecting a tier or custom pattern");
  cmd.add_flag("--allow-special", o.allow_special,
               "Split the tier's special-token literals out of the text");
}

Tokenizer load_tokenizer(const VocabOptions& o, const CLI::App& cmd) {
  std::optional<PretokenizerConfig> cfg;
  Tier tier = parse_tier(o.tier);
  if (!o.pretokenizer_config.empty()) {
    cfg = PretokenizerConfig::from_file(o.pretokenizer_config);
    if (cfg->tier() && cmd.count("--tier") == 0) tier = *cfg->tier();
  }
  VocabLocation where;
  if (!o.rank_file.empty()) where.rank_file = o.rank_file;
  if (!o.vocab_dir.empty()) where.directory = o.vocab_dir;
  Vocabulary vocab = Vocabulary::from_rank_file(resolve_rank_file(tier, where));
  for (auto& [text, id] : tier_special_tokens(tier)) vocab.add_special_token(text, id);
  if (!cfg) cfg = PretokenizerConfig::for_tier(tier);
  if (o.allow_special) {
    for (const auto& [text, id] : vocab.special_tokens()) cfg->special_tokens.push_back(text);
  }
  return Tokenizer(std::move(vocab), std::move(*cfg));
}

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  return read_all(in);
}

// Quoted piece: valid UTF-8 passes through, control and stray bytes become
// \xNN so split multi-byte characters stay visible.
std::string quote_piece(std::string_view bytes) {
  std::string out = "\"";
  std::size_t i = 0;
  char buf[8];
  while (i < bytes.size()) {
    const auto d = unicode::decode_one(bytes.substr(i));
    if (!d) {
      std::snprintf(buf, sizeof buf, "\\x%02X", static_cast<unsigned char>(bytes[i]));
      out += buf;
      ++i;
      continue;
    }
    const char32_t cp = d->cp;
    if (cp == '"' || cp == '\\') {
      out += '\\';
      out += static_cast<char>(cp);
    } else if (cp == '\n') {
      out += "\\n";
    } else if (cp == '\r') {
      out += "\\r";
    } else if (cp == '\t') {
      out += "\\t";
    } else if (cp < 0x20 || cp == 0x7F) {
      std::snprintf(buf, sizeof buf, "\\x%02X", static_cast<unsigned>(cp));
      out += buf;
    } else {
      out.append(bytes.substr(i, d->length));
    }
    i += d->length;
  }
  return out + "\"";
}

int cmd_encode(const VocabOptions& vo, const CLI::App& cmd, const std::optional<std::string>& text,
               const std::string& file, const std::string& mode_text, const std::string& format,
               std::ostream& out) {
  const Mode mode = parse_mode(mode_text);
  const Tokenizer tok = load_tokenizer(vo, cmd);
  std::string input;
  if (!file.empty()) {
    input = read_file(file);
  } else if (text) {
    input = *text;
  } else {
    input = read_all(std::cin);
  }
  const Vocabulary& vocab = tok.vocabulary();
  for (const Tokenizer::Piece& piece : tok.encode_pieces(input, mode)) {
    if (format == "json") {
      nlohmann::ordered_json j;
      j["offset"] = piece.pretoken.offset;
      j["count"] = piece.ids.size();
      j["ids"] = piece.ids;
      std::vector<std::string> pieces;
      for (const TokenId id : piece.ids) pieces.emplace_back(vocab.any_token_bytes(id));
      j["pieces"] = pieces;
      out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
      continue;
    }
    out << piece.pretoken.offset << '\t' << piece.ids.size() << '\t';
    for (std::size_t i = 0; i < piece.ids.size(); ++i) out << (i ? " " : "") << piece.ids[i];
    out << '\t';
    for (std::size_t i = 0; i < piece.ids.size(); ++i) {
      out << (i ? " " : "") << quote_piece(vocab.any_token_bytes(piece.ids[i]));
    }
    out << '\n';
  }
  return kExitOk;
}

struct CorpusOptions {
  // Empty: json-lines for *.jsonl files, plain-lines otherwise.
  std::string format;
  std::string text_field = "text";
  std::optional<std::size_t> limit_docs;
  std::optional<std::size_t> max_bytes;
  bool fail_fast = false;
};

void add_corpus_options(CLI::App& cmd, CorpusOptions& o) {
  cmd.add_option("--corpus-format", o.format,
                 "plain-lines, json-lines or raw-file (default: by file extension)")
      ->check(CLI::IsMember({"plain-lines", "json-lines", "raw-file"}));
  cmd.add_option("--text-field", o.text_field, "Text field for json-lines input")
      ->capture_default_str();
  cmd.add_option("--limit-docs", o.limit_docs, "Stop after this many documents");
  cmd.add_option("--max-bytes", o.max_bytes, "Stop before exceeding this many text bytes");
  cmd.add_flag("--fail-fast", o.fail_fast, "Abort on the first malformed json-lines record");
}

CorpusSource make_source(const CorpusOptions& o, const fs::path& path, std::string language) {
  CorpusSource s;
  s.path = path;
  if (!o.format.empty()) {
    s.format = parse_corpus_format(o.format);
  } else if (path.extension() == ".jsonl") {
    s.format = CorpusFormat::kJsonLines;
  }
  s.text_field = o.text_field;
  s.language_tag = std::move(language);
  s.max_docs = o.limit_docs;
  s.max_bytes = o.max_bytes;
  s.fail_fast = o.fail_fast;
  return s;
}

int cmd_compare(const VocabOptions& vo, const CLI::App& cmd, const CorpusOptions& co,
                const std::string& file, const std::string& format, bool only_nonzero,
                std::ostream& out, std::ostream& err) {
  const Tokenizer tok = load_tokenizer(vo, cmd);
  DocumentReader reader(make_source(co, file, ""));
  std::vector<TsrRecord> records;
  Document doc;
  std::uint64_t greedy = 0;
  std::uint64_t optimal = 0;
  while (reader.next(doc)) {
    records.push_back(document_tsr(tok, doc.text, std::to_string(doc.line)));
    greedy += records.back().tokens_greedy;
    optimal += records.back().tokens_optimal;
  }
  const NonzeroSplit split = nonzero_tsr_split(records);
  const std::vector<TsrRecord>& rows = only_nonzero ? split.subset : records;

  if (format == "json") {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const TsrRecord& r : rows) {
      a.push_back({{"doc_id", r.doc_id},
                   {"greedy_tokens", r.tokens_greedy},
                   {"optimal_tokens", r.tokens_optimal},
                   {"tsr", r.tsr.value()}});
    }
    out << a.dump(2) << '\n';
  } else if (format == "csv") {
    out << "doc_id,greedy_tokens,optimal_tokens,tsr\r\n";
    for (const TsrRecord& r : rows) {
      out << csv_field(r.doc_id) << ',' << r.tokens_greedy << ',' << r.tokens_optimal << ','
          << format_double(r.tsr.value()) << "\r\n";
    }
  } else {
    throw CLI::ValidationError("--format", "expected csv or json");
  }

  err << "documents: " << records.size() << ", greedy tokens: " << greedy
      << ", optimal tokens: " << optimal;
  if (greedy > 0) err << ", micro TSR: " << format_double(tsr(greedy, optimal).value());
  err << ", non-zero TSR: " << format_double(split.percentage) << "%\n";
  for (const std::string& w : reader.warning_messages()) err << "warning: " << w << '\n';
  return kExitOk;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--ks", "not a list of positive integers: " + text);
    }
    if (k == 0) throw CLI::ValidationError("--ks", "k must be positive");
    ks.push_back(k);
  }
  return ks;
}

struct AnalyzeArgs {
  std::vector<std::string> corpora;
  std::string corpus_dir;
  std::string out_dir = "optbpe-report";
  std::string format = "json";
  std::string metrics = "all";
  std::string unit_mode = "whitespace-word";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::size_t context_window = 1024;
  std::string ks = "1,2,4,8,16,32";
  std::size_t samples = 1000;
  bool timing = false;
};

int cmd_analyze(const VocabOptions& vo, const CLI::App& cmd, const CorpusOptions& co,
                const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, fs::path>> inputs;
  for (const std::string& entry : a.corpora) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CLI::ValidationError("--corpus", "expected LANG=PATH, got '" + entry + "'");
    }
    inputs.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  if (!a.corpus_dir.empty()) {
    if (!fs::is_directory(a.corpus_dir)) throw IoError("corpus directory not found: " + a.corpus_dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.corpus_dir)) {
      const std::string ext = e.path().extension().string();
      if (e.is_regular_file() && (ext == ".txt" || ext == ".jsonl")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) inputs.emplace_back(f.stem().string(), f);
  }
  if (inputs.empty()) throw CLI::ValidationError("analyze", "give --corpus LANG=PATH or --corpus-dir");
  for (const auto& [lang, path] : inputs) {
    if (!fs::is_regular_file(path)) throw IoError("corpus file not found: " + path.string());
  }

  AnalysisOptions opts;
  try {
    opts.metrics = parse_metrics(a.metrics);
  } catch (const LookupError& e) {
    throw CLI::ValidationError("--metrics", e.what());
  }
  opts.unit_mode = parse_unit_mode(a.unit_mode);
  opts.seed = a.seed;
  opts.threads = a.threads;
  opts.context_fit.context_window = a.context_window;
  opts.context_fit.ks = parse_ks(a.ks);
  opts.context_fit.samples_per_k = a.samples;
  const ReportFormat format = parse_report_format(a.format);

  const Tokenizer tok = load_tokenizer(vo, cmd);
  std::vector<LanguageReport> reports;
  for (const auto& [lang, path] : inputs) {
    reports.push_back(analyze(make_source(co, path, lang), tok, opts));
    const LanguageReport& r = reports.back();
    err << lang << ": " << r.docs_processed << " docs, " << r.total_greedy_tokens
        << " greedy / " << r.total_optimal_tokens << " optimal tokens";
    if (r.micro_tsr) err << ", micro TSR " << format_double(*r.micro_tsr);
    err << " (" << format_double(r.elapsed_seconds) << " s)\n";
    if (r.warnings > 0) err << lang << ": skipped " << r.warnings << " malformed records\n";
  }

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  EmitOptions emit;
  emit.include_timing = a.timing;
  const auto write = [&](const fs::path& name, auto&& writer) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write report: " + p.string());
    writer(f);
    f.flush();
    if (!f) throw IoError("write failed: " + p.string());
    out << p.string() << '\n';
  };
  if (opts.metrics & kMetricTsr) {
    if (format == ReportFormat::kJson) {
      write("report.json", [&](std::ostream& f) { write_json(reports, f, emit); });
    } else {
      write("tsr.csv", [&](std::ostream& f) { write_tsr_csv(reports, f); });
    }
  }
  if (opts.metrics & kMetricWordLength) {
    write("wordlen_tsr.csv", [&](std::ostream& f) { write_wordlen_csv(reports, f); });
  }
  if (opts.metrics & kMetricFrequency) {
    write("wordlen_frequency.csv", [&](std::ostream& f) { write_frequency_csv(reports, f); });
  }
  if (opts.metrics & kMetricContextFit) {
    write("context_fit.csv", [&](std::ostream& f) { write_context_fit_csv(reports, f); });
  }
  return kExitOk;
}

int cmd_verify_oracle(const OracleOptions& o, std::ostream& out, std::ostream& err) {
  if (o.cases == 0) {
    err << "warning: --cases 0 runs no checks\n";
    out << "oracle: 0 cases, PASS (vacuous)\n";
    return kExitOk;
  }
  const OracleResult r = run_oracle(o);
  out << "oracle: " << r.cases_run << " cases, " << r.count_matches << " count matches, "
      << r.id_matches << " id matches, seed " << o.seed << '\n';
  if (r.passed()) {
    out << "PASS\n";
    return kExitOk;
  }
  out << "FAIL\n" << r.first_mismatch->describe();
  return kExitData;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Greedy and optimal byte-level BPE segmentation with token-saving analysis",
               "optbpe"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  VocabOptions vo;

  CLI::App* encode = app.add_subcommand("encode", "Print token ids and pieces per pre-token");
  add_vocab_options(*encode, vo);
  std::optional<std::string> text;
  std::string input_file;
  std::string mode = "optimal";
  std::string encode_format = "text";
  encode->add_option("text", text, "Text to encode (default: stdin)");
  encode->add_option("--file", input_file, "Read the text from a file");
  encode->add_option("--mode", mode, "greedy or optimal")
      ->check(CLI::IsMember({"greedy", "optimal"}))
      ->capture_default_str();
  encode->add_option("--format", encode_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  CLI::App* compare = app.add_subcommand("compare", "Per-document token saving ratio table");
  add_vocab_options(*compare, vo);
  CorpusOptions compare_corpus;
  add_corpus_options(*compare, compare_corpus);
  std::string compare_file;
  std::string compare_format = "csv";
  bool only_nonzero = false;
  compare->add_option("file", compare_file, "Corpus file")->required();
  compare->add_option("--format", compare_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  compare->add_flag("--only-nonzero", only_nonzero, "Keep only documents with TSR > 0");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Per-language reports and figure data");
  add_vocab_options(*analyze_cmd, vo);
  CorpusOptions analyze_corpus;
  add_corpus_options(*analyze_cmd, analyze_corpus);
  AnalyzeArgs aa;
  aa.threads = std::max(1u, std::thread::hardware_concurrency());
  analyze_cmd->add_option("--corpus", aa.corpora, "LANG=PATH, repeatable");
  analyze_cmd->add_option("--corpus-dir", aa.corpus_dir,
                          "Directory of <lang>.txt / <lang>.jsonl files");
  analyze_cmd->add_option("--out-dir", aa.out_dir, "Output directory")->capture_default_str();
  analyze_cmd->add_option("--format", aa.format, "Summary format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  analyze_cmd->add_option("--metrics", aa.metrics, "tsr,wordlen,freq,context-fit or all")
      ->capture_default_str();
  analyze_cmd->add_option("--unit-mode", aa.unit_mode, "pretoken or whitespace-word")
      ->check(CLI::IsMember({"pretoken", "whitespace-word"}))
      ->capture_default_str();
  analyze_cmd->add_option("--seed", aa.seed, "Sampling seed")->capture_default_str();
  analyze_cmd->add_option("--threads", aa.threads, "Worker threads")->capture_default_str();
  analyze_cmd->add_option("--context-window", aa.context_window, "Context window in tokens")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  analyze_cmd->add_option("--ks", aa.ks, "Comma-separated example counts")->capture_default_str();
  analyze_cmd->add_option("--samples", aa.samples, "Samples per k")->capture_default_str();
  analyze_cmd->add_flag("--timing", aa.timing, "Include wall time in the JSON report");

  CLI::App* verify = app.add_subcommand("verify-oracle",
                                        "Check optimal segmentation against exhaustive search");
  OracleOptions oo;
  verify->add_option("--seed", oo.seed, "Case generator seed")->capture_default_str();
  verify->add_option("--cases", oo.cases, "Number of random cases")->capture_default_str();
  verify->add_option("--max-alphabet", oo.max_alphabet, "Largest alphabet")
      ->check(CLI::Range(1, 26))
      ->capture_default_str();
  verify->add_option("--max-vocab", oo.max_vocab, "Largest vocabulary")->capture_default_str();
  verify->add_option("--max-chunk", oo.max_chunk, "Longest chunk in bytes")
      ->check(CLI::Range(1, 20))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*encode) return cmd_encode(vo, *encode, text, input_file, mode, encode_format, out);
    if (*compare) {
      return cmd_compare(vo, *compare, compare_corpus, compare_file, compare_format, only_nonzero,
                         out, err);
    }
    if (*analyze_cmd) return cmd_analyze(vo, *analyze_cmd, analyze_corpus, aa, out, err);
    if (*verify) return cmd_verify_oracle(oo, out, err);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConsistencyError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace optbpe::cli
