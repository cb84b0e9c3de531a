#include "optbpe/tokenizer.h"

#include <cstdlib>

#include "optbpe/error.h"
#include "optbpe/greedy_segmenter.h"

namespace optbpe {

std::string_view mode_name(Mode mode) {
  return mode == Mode::kGreedy ? "greedy" : "optimal";
}

Mode parse_mode(std::string_view text) {
  if (text == "greedy") return Mode::kGreedy;
  if (text == "optimal") return Mode::kOptimal;
  throw LookupError("unknown mode '" + std::string(text) + "' (expected greedy or optimal)");
}

std::filesystem::path resolve_rank_file(Tier tier, const VocabLocation& where) {
  namespace fs = std::filesystem;
  const std::string name(tier_rank_file_name(tier));
  if (where.rank_file) {
    if (!fs::is_regular_file(*where.rank_file)) {
      throw LookupError("rank file not found: " + where.rank_file->string());
    }
    return *where.rank_file;
  }
  if (where.directory) {
    const fs::path p = *where.directory / name;
    if (!fs::is_regular_file(p)) throw LookupError("rank file not found: " + p.string());
    return p;
  }
  if (const char* env = std::getenv(kVocabDirEnv); env != nullptr && *env != '\0') {
    const fs::path p = fs::path(env) / name;
    if (!fs::is_regular_file(p)) {
      throw LookupError("rank file not found: " + p.string() + " (from $" + kVocabDirEnv + ")");
    }
    return p;
  }
  throw LookupError("no vocabulary location for tier " + std::string(tier_name(tier)) +
                    ". Pass --vocab-dir or set $" + kVocabDirEnv +
                    " to a directory holding " + name +
                    " (published at https://openaipublic.blob.core.windows.net/encodings/" +
                    name + ")");
}

Tokenizer::Tokenizer(Vocabulary vocab, PretokenizerConfig config)
    : vocab_(std::make_shared<const Vocabulary>(std::move(vocab))),
      trie_(std::make_shared<const ReversedTrie>(*vocab_)),
      config_(std::move(config)) {}

Tokenizer Tokenizer::load(Tier tier, const VocabLocation& where) {
  Vocabulary vocab = Vocabulary::from_rank_file(resolve_rank_file(tier, where));
  for (auto& [text, id] : tier_special_tokens(tier)) vocab.add_special_token(text, id);
  return Tokenizer(std::move(vocab), PretokenizerConfig::for_tier(tier));
}

std::size_t Tokenizer::append_chunk(const PreToken& chunk, Mode mode, std::vector<TokenId>& out,
                                    DpState& scratch) const {
  if (chunk.special) {
    const auto id = vocab_->special_token(chunk.bytes);
    if (!id) throw LookupError("unknown special token '" + std::string(chunk.bytes) + "'");
    out.push_back(*id);
    return 1;
  }
  if (mode == Mode::kGreedy) return append_greedy(*vocab_, chunk.bytes, out);
  return append_optimal(*vocab_, *trie_, chunk.bytes, out, scratch);
}

std::vector<Tokenizer::Piece> Tokenizer::encode_pieces(std::string_view text, Mode mode) const {
  std::vector<Piece> pieces;
  DpState scratch;
  for_each_pretoken(text, config_, [&](const PreToken& p) {
    Piece piece{p, {}};
    append_chunk(p, mode, piece.ids, scratch);
    pieces.push_back(std::move(piece));
  });
  return pieces;
}

std::vector<TokenId> Tokenizer::encode(std::string_view text, Mode mode) const {
  std::vector<TokenId> ids;
  DpState scratch;
  for_each_pretoken(text, config_, [&](const PreToken& p) { append_chunk(p, mode, ids, scratch); });
  return ids;
}

std::string Tokenizer::decode(const std::vector<TokenId>& ids) const {
  return optbpe::decode(*vocab_, ids);
}

Tokenizer::Counts Tokenizer::count_both(std::string_view text) const {
  Counts counts;
  std::vector<TokenId> ids;
  DpState scratch;
  for_each_pretoken(text, config_, [&](const PreToken& p) {
    ids.clear();
    counts.greedy += append_chunk(p, Mode::kGreedy, ids, scratch);
    counts.optimal += append_chunk(p, Mode::kOptimal, ids, scratch);
  });
  return counts;
}

std::size_t Tokenizer::count(std::string_view text, Mode mode) const {
  std::size_t total = 0;
  std::vector<TokenId> ids;
  DpState scratch;
  for_each_pretoken(text, config_, [&](const PreToken& p) {
    ids.clear();
    total += append_chunk(p, mode, ids, scratch);
  });
  return total;
}

}  // namespace optbpe
