#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "optbpe/vocabulary.h"

namespace optbpe {

// Trie over the byte-reversed tokens of a vocabulary. Walking bytes
// b[i], b[i-1], ..., b[j] from the root reaches a terminal node exactly when
// b[j..i] is a token, which is the suffix query the optimal segmenter needs.
//
// Nodes live in one arena. The root keeps a dense 256-way table; every other
// node stores its children as a sorted slice of a shared edge array, so
// memory stays linear in the total token length.
class ReversedTrie {
 public:
  using Node = std::uint32_t;
  static constexpr Node kNone = 0xFFFFFFFFu;

  explicit ReversedTrie(const Vocabulary& vocab);

  Node root() const { return 0; }

  // Child of `node` along `byte`, or kNone.
  Node child(Node node, std::uint8_t byte) const {
    if (node == 0) return root_children_[byte];
    const NodeData& n = nodes_[node];
    const Edge* first = edges_.data() + n.first_edge;
    const Edge* last = first + n.edge_count;
    if (n.edge_count <= 8) {
      for (const Edge* e = first; e != last; ++e) {
        if (e->byte == byte) return e->target;
      }
      return kNone;
    }
    while (first < last) {
      const Edge* mid = first + (last - first) / 2;
      if (mid->byte < byte) {
        first = mid + 1;
      } else {
        last = mid;
      }
    }
    return (first != edges_.data() + n.first_edge + n.edge_count && first->byte == byte)
               ? first->target
               : kNone;
  }

  // Token id if `node` ends a reversed token.
  std::optional<TokenId> terminal(Node node) const {
    const TokenId t = nodes_[node].token;
    if (t == kNoToken) return std::nullopt;
    return t;
  }

  // Walks `bytes` back to front. Returns the token id if the full string is a
  // vocabulary token.
  std::optional<TokenId> find(std::string_view bytes) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

 private:
  static constexpr TokenId kNoToken = 0xFFFFFFFFu;

  struct Edge {
    std::uint8_t byte;
    Node target;
  };
  struct NodeData {
    std::uint32_t first_edge = 0;
    std::uint16_t edge_count = 0;
    TokenId token = kNoToken;
  };

  std::array<Node, 256> root_children_{};
  std::vector<NodeData> nodes_;
  std::vector<Edge> edges_;
};

}  // namespace optbpe
