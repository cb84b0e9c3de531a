#include "optbpe/reversed_trie.h"

#include <algorithm>
#include <utility>


namespace optbpe {

ReversedTrie::ReversedTrie(const Vocabulary& vocab) {
  root_children_.fill(kNone);

  // Build with per-node sparse child lists, then flatten into one edge array.
  std::vector<std::vector<std::pair<std::uint8_t, Node>>> children(1);
  nodes_.emplace_back();

  for (TokenId id = 0; id < vocab.size(); ++id) {
    const std::string_view token = vocab.token_bytes(id);
    Node node = 0;
    for (auto it = token.rbegin(); it != token.rend(); ++it) {
      const auto byte = static_cast<std::uint8_t>(*it);
      Node next = kNone;
      if (node == 0) {
        next = root_children_[byte];
      } else {
        for (const auto& [b, target] : children[node]) {
          if (b == byte) {
            next = target;
            break;
          }
        }
      }
      if (next == kNone) {
        next = static_cast<Node>(nodes_.size());
        nodes_.emplace_back();
        children.emplace_back();
        if (node == 0) {
          root_children_[byte] = next;
        } else {
          children[node].emplace_back(byte, next);
        }
      }
      node = next;
    }
    nodes_[node].token = id;
  }

  edges_.reserve(nodes_.size());
  for (Node n = 1; n < nodes_.size(); ++n) {
    auto& list = children[n];
    std::sort(list.begin(), list.end());
    nodes_[n].first_edge = static_cast<std::uint32_t>(edges_.size());
    nodes_[n].edge_count = static_cast<std::uint16_t>(list.size());
    for (const auto& [byte, target] : list) edges_.push_back({byte, target});
    list = {};
  }
}

std::optional<TokenId> ReversedTrie::find(std::string_view bytes) const {
  if (bytes.empty()) return std::nullopt;
  Node node = root();
  for (auto it = bytes.rbegin(); it != bytes.rend(); ++it) {
    node = child(node, static_cast<std::uint8_t>(*it));
    if (node == kNone) return std::nullopt;
  }
  return terminal(node);
}

}  // namespace optbpe
