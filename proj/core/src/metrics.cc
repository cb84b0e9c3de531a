#include "optbpe/metrics.h"

#include <numeric>
#include <random>

#include "optbpe/error.h"
#include "optbpe/unicode.h"
#include "random_util.h"

namespace optbpe {
namespace {

std::size_t leading_whitespace_bytes(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto d = unicode::decode_one(s.substr(i));
    if (!d || !unicode::is_whitespace(d->cp)) break;
    i += d->length;
  }
  return i;
}

}  // namespace

TokenSavingRatio::TokenSavingRatio(std::size_t base_count, std::size_t alt_count)
    : base_(base_count), alt_(alt_count) {
  if (base_count == 0) throw UndefinedMetricError("token saving ratio with zero baseline tokens");
  if (alt_count == 0) throw UndefinedMetricError("token saving ratio with zero alternative tokens");
}

TokenSavingRatio tsr(std::size_t base_count, std::size_t alt_count) {
  return TokenSavingRatio(base_count, alt_count);
}

TsrRecord document_tsr(const Tokenizer& tokenizer, std::string_view doc, std::string doc_id) {
  const Tokenizer::Counts c = tokenizer.count_both(doc);
  if (c.greedy == 0) {
    throw UndefinedMetricError("document '" + doc_id + "' produced no tokens");
  }
  return TsrRecord{std::move(doc_id), c.greedy, c.optimal, tsr(c.greedy, c.optimal)};
}

NonzeroSplit nonzero_tsr_split(std::span<const TsrRecord> records) {
  NonzeroSplit out;
  for (const TsrRecord& r : records) {
    if (r.tsr.positive()) out.subset.push_back(r);
  }
  if (!records.empty()) {
    out.percentage = 100.0 * static_cast<double>(out.subset.size()) /
                     static_cast<double>(records.size());
  }
  return out;
}

std::string_view unit_mode_name(UnitMode mode) {
  return mode == UnitMode::kPretoken ? "pretoken" : "whitespace-word";
}

UnitMode parse_unit_mode(std::string_view text) {
  if (text == "pretoken") return UnitMode::kPretoken;
  if (text == "whitespace-word" || text == "word") return UnitMode::kWhitespaceWord;
  throw LookupError("unknown unit mode '" + std::string(text) +
                    "' (expected pretoken or whitespace-word)");
}

std::vector<std::string_view> whitespace_words(std::string_view doc) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  std::size_t start = std::string_view::npos;
  while (i < doc.size()) {
    const auto d = unicode::decode_one(doc.substr(i));
    const std::size_t len = d ? d->length : 1;
    const bool space = d && unicode::is_whitespace(d->cp);
    if (space && start != std::string_view::npos) {
      words.push_back(doc.substr(start, i - start));
      start = std::string_view::npos;
    } else if (!space && start == std::string_view::npos) {
      start = i;
    }
    i += len;
  }
  if (start != std::string_view::npos) words.push_back(doc.substr(start));
  return words;
}

std::vector<UnitCounts> unit_counts(const Tokenizer& tokenizer, std::string_view doc,
                                    UnitMode mode) {
  std::vector<UnitCounts> units;
  std::vector<TokenId> scratch_ids;
  DpState scratch;
  if (mode == UnitMode::kPretoken) {
    for_each_pretoken(doc, tokenizer.config(), [&](const PreToken& p) {
      const std::size_t skip = leading_whitespace_bytes(p.bytes);
      if (skip == p.bytes.size()) return;
      UnitCounts u;
      u.length = unicode::count_scalars(p.bytes.substr(skip));
      scratch_ids.clear();
      u.greedy = tokenizer.append_chunk(p, Mode::kGreedy, scratch_ids, scratch);
      u.optimal = tokenizer.append_chunk(p, Mode::kOptimal, scratch_ids, scratch);
      units.push_back(u);
    });
    return units;
  }
  for (const std::string_view word : whitespace_words(doc)) {
    const Tokenizer::Counts c = tokenizer.count_both(word);
    units.push_back({unicode::count_scalars(word), c.greedy, c.optimal});
  }
  return units;
}

void WordLengthTsrProfile::add(const UnitCounts& unit) {
  WordLenBucket& b = buckets_[unit.length];
  b.length = unit.length;
  ++b.word_count;
  b.tsr_sum += tsr(unit.greedy, unit.optimal).value();
}

std::vector<WordLenBucket> WordLengthTsrProfile::buckets() const {
  std::vector<WordLenBucket> out;
  out.reserve(buckets_.size());
  for (const auto& [len, b] : buckets_) out.push_back(b);
  return out;
}

std::vector<WordLenBucket> wordlen_tsr_profile(const Tokenizer& tokenizer,
                                               std::span<const std::string> corpus,
                                               UnitMode mode) {
  WordLengthTsrProfile profile;
  for (const std::string& doc : corpus) {
    for (const UnitCounts& u : unit_counts(tokenizer, doc, mode)) profile.add(u);
  }
  return profile.buckets();
}

void WordLengthHistogram::add_document(std::string_view doc) {
  for (const std::string_view word : whitespace_words(doc)) ++counts_[unicode::count_scalars(word)];
}

std::vector<std::pair<std::size_t, std::size_t>> WordLengthHistogram::entries() const {
  return {counts_.begin(), counts_.end()};
}

std::vector<std::pair<std::size_t, std::size_t>> wordlen_frequency_profile(
    std::span<const std::string> corpus) {
  WordLengthHistogram h;
  for (const std::string& doc : corpus) h.add_document(doc);
  return h.entries();
}

std::vector<ContextFitPoint> context_fit_profile(std::span<const std::size_t> example_tokens,
                                                 const ContextFitOptions& options) {
  if (options.context_window == 0) throw BoundError("context window must be at least 1");
  std::vector<ContextFitPoint> out;
  const std::size_t n = example_tokens.size();
  if (n == 0 || options.samples_per_k == 0) return out;

  std::vector<std::size_t> order(n);
  for (const std::size_t k : options.ks) {
    if (k == 0 || k > n) continue;
    std::mt19937_64 rng(detail::splitmix64(options.seed ^ detail::splitmix64(k)));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t fits = 0;
    for (std::size_t s = 0; s < options.samples_per_k; ++s) {
      // Partial Fisher-Yates: the first k slots become a uniform k-subset.
      // The permutation carries over between samples, which keeps each
      // draw uniform.
      std::size_t total = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(detail::draw_below(rng, n - i));
        std::swap(order[i], order[j]);
        total += example_tokens[order[i]];
      }
      if (total <= options.context_window) ++fits;
    }
    out.push_back({k, 100.0 * static_cast<double>(fits) /
                          static_cast<double>(options.samples_per_k)});
  }
  return out;
}

std::vector<ContextFitPoint> context_fit_profile(const Tokenizer& tokenizer,
                                                 std::span<const std::string> examples,
                                                 const ContextFitOptions& options, Mode mode) {
  std::vector<std::size_t> counts;
  counts.reserve(examples.size());
  for (const std::string& e : examples) counts.push_back(tokenizer.count(e, mode));
  return context_fit_profile(counts, options);
}

}  // namespace optbpe
