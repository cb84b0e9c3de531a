#include <gtest/gtest.h>

#include <sstream>

#include "optbpe/corpus_analyzer.h"
#include "optbpe/error.h"
#include "optbpe/report.h"
#include "test_support.h"

namespace optbpe {
namespace {

CorpusSource source_for(const std::filesystem::path& path,
                        CorpusFormat format = CorpusFormat::kPlainLines) {
  CorpusSource s;
  s.path = path;
  s.format = format;
  s.language_tag = "xx";
  return s;
}

TEST(Reader, PlainLines) {
  test::TempDir dir;
  const auto p = dir.write("c.txt", "one\ntwo\r\n\nthree");
  EXPECT_EQ(read_documents(source_for(p)), (std::vector<std::string>{"one", "two", "three"}));

  DocumentReader reader(source_for(p));
  Document d;
  std::vector<std::size_t> lines;
  while (reader.next(d)) lines.push_back(d.line);
  EXPECT_EQ(lines, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(reader.documents_read(), 3u);
  EXPECT_EQ(reader.bytes_read(), 11u);
}

TEST(Reader, MaxDocs) {
  test::TempDir dir;
  CorpusSource s = source_for(dir.write("c.txt", "one\ntwo\nthree\n"));
  s.max_docs = 1;
  EXPECT_EQ(read_documents(s), (std::vector<std::string>{"one"}));
}

TEST(Reader, MaxBytesStopsBeforeOverflow) {
  test::TempDir dir;
  CorpusSource s = source_for(dir.write("c.txt", "aaaa\nbbbb\ncccc\n"));
  s.max_bytes = 9;
  EXPECT_EQ(read_documents(s), (std::vector<std::string>{"aaaa", "bbbb"}));
  s.max_bytes = 3;
  EXPECT_TRUE(read_documents(s).empty());
}

TEST(Reader, RawFileCutsOnScalarBoundary) {
  test::TempDir dir;
  CorpusSource s = source_for(dir.write("c.txt", "ab\xc3\xbc" "cd\n"), CorpusFormat::kRawFile);
  EXPECT_EQ(read_documents(s), (std::vector<std::string>{"ab\xc3\xbc" "cd\n"}));
  s.max_bytes = 3;
  EXPECT_EQ(read_documents(s), (std::vector<std::string>{"ab"}));
}

TEST(Reader, JsonLinesSkipsBadRecordsWithWarnings) {
  test::TempDir dir;
  std::string content;
  for (int i = 0; i < 10; ++i) {
    content += i == 6 ? std::string("{not json") : R"({"text": "doc )" + std::to_string(i) + "\"}";
    content += "\n";
  }
  CorpusSource s = source_for(dir.write("c.jsonl", content), CorpusFormat::kJsonLines);
  DocumentReader reader(s);
  Document d;
  std::size_t n = 0;
  while (reader.next(d)) ++n;
  EXPECT_EQ(n, 9u);
  EXPECT_EQ(reader.warnings(), 1u);
  ASSERT_EQ(reader.warning_messages().size(), 1u);
  EXPECT_NE(reader.warning_messages()[0].find(":7:"), std::string::npos);

  s.fail_fast = true;
  try {
    read_documents(s);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
}

TEST(Reader, JsonLinesFieldProblems) {
  test::TempDir dir;
  CorpusSource s = source_for(dir.write("c.jsonl",
                                        "{\"body\": \"x\"}\n"
                                        "{\"text\": 3}\n"
                                        "{\"text\": \"\"}\n"
                                        "[1]\n"
                                        "{\"body\": \"kept\", \"text\": \"y\"}\n"),
                              CorpusFormat::kJsonLines);
  DocumentReader reader(s);
  Document d;
  ASSERT_TRUE(reader.next(d));
  EXPECT_EQ(d.text, "y");
  EXPECT_FALSE(reader.next(d));
  EXPECT_EQ(reader.warnings(), 4u);

  s.text_field = "body";
  EXPECT_EQ(read_documents(s), (std::vector<std::string>{"x", "kept"}));
}

TEST(Reader, MissingFile) {
  EXPECT_THROW(DocumentReader(source_for("/nonexistent/corpus.txt")), IoError);
}

TEST(Formats, Names) {
  EXPECT_EQ(parse_corpus_format("json-lines"), CorpusFormat::kJsonLines);
  EXPECT_EQ(corpus_format_name(CorpusFormat::kRawFile), "raw-file");
  EXPECT_THROW(parse_corpus_format("xml"), LookupError);
  EXPECT_EQ(parse_metrics("tsr,freq"), kMetricTsr | kMetricFrequency);
  EXPECT_EQ(parse_metrics("all"), kMetricAll);
  EXPECT_EQ(metrics_string(kMetricAll), "tsr,wordlen,freq,context-fit");
  EXPECT_THROW(parse_metrics("tsr,speed"), LookupError);
}

TEST(Analyze, RepeatedByteDocument) {
  test::TempDir dir;
  // Greedy: a a a a -> aa a a -> aa aa. Optimal also needs two tokens.
  const Tokenizer tok(test::byte_vocab({"aa", "aaa"}), PretokenizerConfig::for_tier(Tier::k50k));
  const LanguageReport r = analyze(source_for(dir.write("c.txt", "aaaa\n")), tok);
  EXPECT_EQ(r.docs_processed, 1u);
  EXPECT_EQ(r.bytes_processed, 4u);
  EXPECT_EQ(r.total_greedy_tokens, 2u);
  EXPECT_EQ(r.total_optimal_tokens, 2u);
  EXPECT_EQ(r.micro_tsr, 0.0);
  EXPECT_EQ(r.macro_tsr, 0.0);
  EXPECT_EQ(r.nonzero_tsr_percentage, 0.0);
  ASSERT_EQ(r.wordlen_buckets.size(), 1u);
  EXPECT_EQ(r.wordlen_buckets[0].length, 4u);
  EXPECT_EQ(r.frequency, (std::vector<std::pair<std::size_t, std::size_t>>{{4, 1}}));
  EXPECT_EQ(r.metadata.tier, "50k");
  EXPECT_EQ(r.metadata.pattern_hash.size(), 16u);
}

TEST(Analyze, BlockingMergeDocument) {
  test::TempDir dir;
  const Tokenizer tok(test::byte_vocab({"ab", "bcd"}), PretokenizerConfig::for_tier(Tier::k50k));
  const LanguageReport r = analyze(source_for(dir.write("c.txt", "abcd\nab\n")), tok);
  EXPECT_EQ(r.total_greedy_tokens, 4u);
  EXPECT_EQ(r.total_optimal_tokens, 3u);
  EXPECT_DOUBLE_EQ(*r.micro_tsr, 0.25);
  EXPECT_DOUBLE_EQ(*r.macro_tsr, (1.0 / 3.0) / 2.0);
  EXPECT_EQ(r.nonzero_tsr_percentage, 50.0);
}

TEST(Analyze, EmptyCorpusHasNullRatios) {
  test::TempDir dir;
  const LanguageReport r =
      analyze(source_for(dir.write("c.txt", "\n\n")), test::tier_tokenizer(Tier::k100k));
  EXPECT_EQ(r.docs_processed, 0u);
  EXPECT_FALSE(r.micro_tsr.has_value());
  EXPECT_FALSE(r.macro_tsr.has_value());
  EXPECT_TRUE(r.context_fit_greedy.empty());
}

TEST(Analyze, MetricSelection) {
  test::TempDir dir;
  AnalysisOptions opts;
  opts.metrics = kMetricFrequency;
  const LanguageReport r = analyze(source_for(dir.write("c.txt", "hello world\n")),
                                   test::tier_tokenizer(Tier::k100k), opts);
  EXPECT_FALSE(r.micro_tsr.has_value());
  EXPECT_TRUE(r.wordlen_buckets.empty());
  EXPECT_TRUE(r.context_fit_greedy.empty());
  EXPECT_EQ(r.frequency, (std::vector<std::pair<std::size_t, std::size_t>>{{5, 2}}));
  EXPECT_EQ(r.metadata.metrics, "freq");
  EXPECT_EQ(r.metadata.context_window, 0u);
}

TEST(Analyze, InvalidUtf8NamesLocation) {
  test::TempDir dir;
  const auto p = dir.write("c.txt", "fine\nbad \xff byte\n");
  try {
    analyze(source_for(p), test::tier_tokenizer(Tier::k100k));
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(p.string() + ":2:"), std::string::npos) << e.what();
  }
}

std::string json_of(const LanguageReport& r) {
  std::ostringstream os;
  write_json(std::span<const LanguageReport>(&r, 1), os);
  return os.str();
}

TEST(Analyze, ThreadCountDoesNotChangeReport) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k100k);
  CorpusSource s = source_for(test::sample_dir() / "fin.txt");
  AnalysisOptions opts;
  opts.threads = 1;
  const std::string one = json_of(analyze(s, tok, opts));
  opts.threads = 4;
  opts.batch_size = 3;
  const std::string four = json_of(analyze(s, tok, opts));
  EXPECT_EQ(one, four);
  opts.context_fit_pool = 5;
  opts.threads = 2;
  const std::string small_pool_a = json_of(analyze(s, tok, opts));
  opts.threads = 3;
  EXPECT_EQ(small_pool_a, json_of(analyze(s, tok, opts)));
}

TEST(Analyze, LanguagesAreIndependent) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k100k);
  const CorpusSource a = source_for(test::sample_dir() / "tur.txt");
  const CorpusSource b = source_for(test::sample_dir() / "eus.txt");
  const std::string a_first = json_of(analyze(a, tok));
  const std::string b_after = json_of(analyze(b, tok));
  const std::string b_first = json_of(analyze(b, tok));
  EXPECT_EQ(b_after, b_first);
  EXPECT_EQ(a_first, json_of(analyze(a, tok)));
}

TEST(Analyze, SampleCorpusInvariants) {
  const Tokenizer& tok = test::tier_tokenizer(Tier::k100k);
  const LanguageReport r = analyze(source_for(test::sample_dir() / "tur.txt"), tok);
  EXPECT_GT(r.docs_processed, 50u);
  EXPECT_LE(r.total_optimal_tokens, r.total_greedy_tokens);
  ASSERT_TRUE(r.micro_tsr.has_value());
  EXPECT_GE(*r.micro_tsr, 0.0);
  EXPECT_LT(*r.micro_tsr, 1.0);
  EXPECT_DOUBLE_EQ(*r.micro_tsr, static_cast<double>(r.total_greedy_tokens - r.total_optimal_tokens) /
                                     static_cast<double>(r.total_greedy_tokens));
  ASSERT_EQ(r.context_fit_greedy.size(), r.context_fit_optimal.size());
  for (std::size_t i = 0; i < r.context_fit_greedy.size(); ++i) {
    EXPECT_GE(r.context_fit_optimal[i].fit_percentage, r.context_fit_greedy[i].fit_percentage);
  }
  std::size_t words = 0;
  for (const auto& [len, n] : r.frequency) words += n;
  std::size_t units = 0;
  for (const WordLenBucket& b : r.wordlen_buckets) units += b.word_count;
  EXPECT_EQ(words, units);
}

}  // namespace
}  // namespace optbpe
