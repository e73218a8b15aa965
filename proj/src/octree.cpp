#include "octree.hpp"

#include "errors.hpp"

#include <algorithm>
#include <string>

namespace vxpc {

HighLevelOctree
buildOctree(std::span<const BlockLocation> origins, int depth)
{
  checkDepth(depth);
  HighLevelOctree tree;
  tree.depth = depth;
  const int levels = tree.levels();
  const int32_t gridSide = int32_t(1) << depth;

  // Region coordinates in units of 64 voxels.
  std::vector<Voxel> cells;
  cells.reserve(origins.size());
  for (const auto& o : origins) {
    const auto& v = o.origin;
    if (v.x < 0 || v.y < 0 || v.z < 0 || v.x >= gridSide || v.y >= gridSide
        || v.z >= gridSide)
      throw ArgumentError("block origin outside the 2^depth grid");
    if ((v.x | v.y | v.z) % kRegionSide != 0)
      throw ArgumentError("block origin is not a multiple of 64");
    cells.push_back({v.x / kRegionSide, v.y / kRegionSide, v.z / kRegionSide});
  }
  if (levels == 0)
    return tree;

  // Sorting by the interleaved (Morton) key gives breadth-first order at
  // every level: a node's key is the prefix of its descendants' keys.
  const auto mortonKey = [levels](const Voxel& c) {
    uint64_t key = 0;
    for (int l = levels - 1; l >= 0; l--) {
      const int k = 4 * ((c.x >> l) & 1) + 2 * ((c.y >> l) & 1)
        + ((c.z >> l) & 1);
      key = (key << 3) | uint64_t(k);
    }
    return key;
  };
  std::vector<uint64_t> keys;
  keys.reserve(cells.size());
  for (const auto& c : cells)
    keys.push_back(mortonKey(c));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  // At level l, the node is identified by the top 3*l bits of the key.
  for (int l = 0; l < levels; l++) {
    const int shift = 3 * (levels - l);
    std::size_t i = 0;
    while (i < keys.size()) {
      const uint64_t node = keys[i] >> shift;
      uint8_t byte = 0;
      while (i < keys.size() && (keys[i] >> shift) == node) {
        const int k = static_cast<int>((keys[i] >> (shift - 3)) & 7);
        byte |= uint8_t(0x80 >> k);
        i++;
      }
      tree.bytes.push_back(byte);
    }
  }
  return tree;
}

std::vector<uint8_t>
serializeOctree(const HighLevelOctree& tree)
{
  return tree.bytes;
}

ParsedOctree
parseOctree(std::span<const uint8_t> bytes, int depth)
{
  checkDepth(depth);
  const int levels = depth - kMinDepth;
  ParsedOctree out;

  std::vector<Voxel> nodes{{0, 0, 0}};
  std::size_t pos = 0;
  for (int l = 0; l < levels; l++) {
    std::vector<Voxel> next;
    for (const auto& n : nodes) {
      if (pos >= bytes.size())
        throw FormatError("truncated octree", pos);
      const uint8_t byte = bytes[pos];
      if (byte == 0)
        throw FormatError("empty octree node", pos);
      pos++;
      for (int k = 0; k < 8; k++) {
        if (!(byte & (0x80 >> k)))
          continue;
        next.push_back(
          {2 * n.x + ((k >> 2) & 1), 2 * n.y + ((k >> 1) & 1),
           2 * n.z + (k & 1)});
      }
    }
    nodes = std::move(next);
  }

  std::sort(nodes.begin(), nodes.end());
  out.origins.reserve(nodes.size());
  for (const auto& n : nodes)
    out.origins.push_back(
      {{n.x * kRegionSide, n.y * kRegionSide, n.z * kRegionSide}, kRegionSide});
  out.bytesConsumed = pos;
  return out;
}

}  // namespace vxpc
