#include <gtest/gtest.h>
#include <sys/resource.h>

#include <random>

#include "optbpe/corpus_analyzer.h"
#include "test_support.h"

namespace optbpe {
namespace {

std::size_t peak_rss_kib() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<std::size_t>(usage.ru_maxrss);
}

// Returns the number of lines written.
std::size_t write_synthetic(const std::filesystem::path& path, std::size_t bytes,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::ofstream out(path, std::ios::binary);
  std::string line;
  std::size_t written = 0;
  std::size_t lines = 0;
  while (written < bytes) {
    line.clear();
    const std::size_t words = 5 + rng() % 40;
    for (std::size_t w = 0; w < words; ++w) {
      if (w) line += ' ';
      const std::size_t len = 1 + rng() % 12;
      for (std::size_t i = 0; i < len; ++i) line += static_cast<char>('a' + rng() % 8);
    }
    line += '\n';
    out << line;
    written += line.size();
    ++lines;
  }
  return lines;
}

TEST(Streaming, PeakMemoryDoesNotGrowWithCorpusSize) {
  test::TempDir dir;
  const auto small = dir.path() / "small.txt";
  const auto large = dir.path() / "large.txt";
  const std::size_t small_lines = write_synthetic(small, 10u << 20, 1);
  const std::size_t large_lines = write_synthetic(large, 100u << 20, 2);

  std::vector<std::string> extra;
  for (char a = 'a'; a < 'i'; ++a) {
    for (char b = 'a'; b < 'i'; ++b) {
      extra.push_back({a, b});
      extra.push_back({a, b, 'a'});
    }
  }
  const Tokenizer tok(test::byte_vocab(extra), PretokenizerConfig::for_tier(Tier::k50k));
  AnalysisOptions opts;
  opts.threads = 2;

  CorpusSource s;
  s.path = small;
  const LanguageReport r_small = analyze(s, tok, opts);
  const std::size_t after_small = peak_rss_kib();

  s.path = large;
  const LanguageReport r_large = analyze(s, tok, opts);
  const std::size_t after_large = peak_rss_kib();

  EXPECT_EQ(r_small.docs_processed, small_lines);
  EXPECT_EQ(r_large.docs_processed, large_lines);
  EXPECT_EQ(r_large.bytes_processed + large_lines, std::filesystem::file_size(large));
  // Ten times the input may not add more than 32 MiB to the peak, and the
  // whole run stays under 256 MiB.
  EXPECT_LT(after_large - after_small, 32u * 1024) << after_small << " KiB -> " << after_large;
  EXPECT_LT(after_large, 256u * 1024);
  std::cout << "peak RSS after 10 MiB: " << after_small / 1024 << " MiB, after 100 MiB: "
            << after_large / 1024 << " MiB\n";
}

}  // namespace
}  // namespace optbpe
