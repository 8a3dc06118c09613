#pragma once

#include <vector>

#include "grapes/graph.hpp"

namespace grapes {

// Layer sets K(0..L) plus the L normalized adjacency blocks consumed by the
// classifier. Block l (1-based) connects rows K(l) to cols K(l-1); targets
// appear in every layer set.
struct SampledSubgraph {
  std::vector<std::vector<int>> layer_sets;  // size L+1, layer_sets[0] = targets
  std::vector<LayerAdjacency> blocks;        // size L, blocks[l-1] = block l

  int depth() const { return static_cast<int>(blocks.size()); }
};

}  // namespace grapes
