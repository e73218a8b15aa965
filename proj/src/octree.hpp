#pragma once

#include "geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vxpc {

// Occupancy tree locating the non-empty 64^3 regions of a 2^depth grid.
//
// Serialized as one byte per internal node in breadth-first order. Bit
// (7 - k) of a node byte is set iff child k is non-empty, with child index
// k = 4*x_bit + 2*y_bit + z_bit. A tree of depth 6 has no internal nodes.
struct HighLevelOctree {
  int depth = kMinDepth;
  std::vector<uint8_t> bytes;

  int levels() const { return depth - kMinDepth; }
};

HighLevelOctree buildOctree(std::span<const BlockLocation> origins, int depth);

std::vector<uint8_t> serializeOctree(const HighLevelOctree& tree);

struct ParsedOctree {
  // Region origins in raster order.
  std::vector<BlockLocation> origins;
  std::size_t bytesConsumed = 0;
};

// Reads exactly one tree from the front of `bytes`; trailing data is left
// for the caller.
ParsedOctree parseOctree(std::span<const uint8_t> bytes, int depth);

}  // namespace vxpc
