#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optbpe/optimal_segmenter.h"
#include "optbpe/pretokenizer.h"
#include "optbpe/reversed_trie.h"
#include "optbpe/vocabulary.h"

namespace optbpe {

enum class Mode { kGreedy, kOptimal };

std::string_view mode_name(Mode mode);
// "greedy" or "optimal". Throws LookupError.
Mode parse_mode(std::string_view text);

// Environment variable naming a directory of rank files.
inline constexpr const char* kVocabDirEnv = "OPTBPE_VOCAB_DIR";

// Where to find a tier's rank file. Checked in order: explicit file, explicit
// directory, $OPTBPE_VOCAB_DIR. Nothing is downloaded; a miss throws
// LookupError carrying download instructions.
struct VocabLocation {
  std::optional<std::filesystem::path> rank_file;
  std::optional<std::filesystem::path> directory;
};

std::filesystem::path resolve_rank_file(Tier tier, const VocabLocation& where = {});

// Vocabulary, reversed trie and pre-tokenizer bundled together. Read-only
// after construction; every method is safe to call concurrently.
class Tokenizer {
 public:
  Tokenizer(Vocabulary vocab, PretokenizerConfig config);

  // Loads the tier's rank file, registers its special tokens and uses its
  // published pattern.
  static Tokenizer load(Tier tier, const VocabLocation& where = {});

  const Vocabulary& vocabulary() const { return *vocab_; }
  const ReversedTrie& trie() const { return *trie_; }
  const PretokenizerConfig& config() const { return config_; }

  struct Piece {
    PreToken pretoken;
    std::vector<TokenId> ids;
  };

  // Pre-tokenizes and segments each pre-token. Pieces view into `text`.
  std::vector<Piece> encode_pieces(std::string_view text, Mode mode) const;

  std::vector<TokenId> encode(std::string_view text, Mode mode) const;
  std::string decode(const std::vector<TokenId>& ids) const;

  struct Counts {
    std::size_t greedy = 0;
    std::size_t optimal = 0;
  };
  // Token counts of both modes over the same pre-tokens.
  Counts count_both(std::string_view text) const;
  std::size_t count(std::string_view text, Mode mode) const;

  // Segments one pre-token.
  std::size_t append_chunk(const PreToken& chunk, Mode mode, std::vector<TokenId>& out,
                           DpState& scratch) const;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const ReversedTrie> trie_;
  PretokenizerConfig config_;
};

}  // namespace optbpe
