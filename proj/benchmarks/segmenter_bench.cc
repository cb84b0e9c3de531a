#include <benchmark/benchmark.h>

#include <fstream>
#include <iterator>
#include <map>
#include <memory>

#include "optbpe/greedy_segmenter.h"
#include "optbpe/optimal_segmenter.h"
#include "optbpe/tokenizer.h"

namespace {

using optbpe::Mode;
using optbpe::Tier;
using optbpe::Tokenizer;

const Tokenizer& tokenizer(Tier tier) {
  static std::map<Tier, std::unique_ptr<Tokenizer>> cache;
  auto& slot = cache[tier];
  if (!slot) {
    optbpe::VocabLocation where;
    where.directory = OPTBPE_BENCH_VOCAB_DIR;
    slot = std::make_unique<Tokenizer>(Tokenizer::load(tier, where));
  }
  return *slot;
}

const std::string& english() {
  static const std::string text = [] {
    std::ifstream in(OPTBPE_BENCH_TEXT, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }();
  return text;
}

Tier tier_arg(const benchmark::State& state) { return optbpe::kAllTiers[state.range(0)]; }

void BM_Encode(benchmark::State& state, Mode mode) {
  const Tokenizer& tok = tokenizer(tier_arg(state));
  const std::string& text = english();
  for (auto _ : state) benchmark::DoNotOptimize(tok.encode(text, mode));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
  state.SetLabel(std::string(optbpe::tier_name(tier_arg(state))));
}
BENCHMARK_CAPTURE(BM_Encode, greedy, Mode::kGreedy)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_Encode, optimal, Mode::kOptimal)->DenseRange(0, 2);

// Optimal segmentation of one long chunk, bypassing pre-tokenization.
void BM_OptimalChunk(benchmark::State& state) {
  const Tokenizer& tok = tokenizer(Tier::k50k);
  std::string chunk;
  while (chunk.size() < static_cast<std::size_t>(state.range(0))) chunk += english();
  chunk.resize(static_cast<std::size_t>(state.range(0)));
  optbpe::DpState scratch;
  std::vector<optbpe::TokenId> ids;
  for (auto _ : state) {
    ids.clear();
    optbpe::append_optimal(tok.vocabulary(), tok.trie(), chunk, ids, scratch);
    benchmark::DoNotOptimize(ids.data());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * chunk.size()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OptimalChunk)->RangeMultiplier(2)->Range(1 << 10, 1 << 16)->Complexity();

void BM_TrieBuild(benchmark::State& state) {
  const optbpe::Vocabulary& vocab = tokenizer(tier_arg(state)).vocabulary();
  for (auto _ : state) {
    optbpe::ReversedTrie trie(vocab);
    benchmark::DoNotOptimize(trie.node_count());
  }
  state.SetLabel(std::string(optbpe::tier_name(tier_arg(state))));
}
BENCHMARK(BM_TrieBuild)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
