#pragma once

#include <cstddef>
#include <vector>

#include "optbpe/vocabulary.h"

namespace optbpe {

// Ordered tokens whose bytes concatenate to the segmented chunk.
struct Segmentation {
  std::vector<TokenId> token_ids;

  std::size_t count() const { return token_ids.size(); }

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

}  // namespace optbpe
