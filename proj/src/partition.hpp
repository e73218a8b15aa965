#pragma once

#include "occupancy_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vxpc {

// Partition decisions, emitted in preorder as 2-bit symbols.
enum class PartitionFlag : uint8_t
{
  Empty = 0,
  Single = 1,
  Split = 2,
};

constexpr int kMaxPartitionLevel = 5;  // 64 -> 32 -> 16 -> 8 -> 4

// Side of a block at partition level `level`, where level 1 is `topSide`.
int sideAtLevel(int topSide, int level);

struct Leaf {
  Voxel origin;  // relative to the partitioned block
  int side = 0;

  friend bool operator==(const Leaf&, const Leaf&) = default;
};

struct PartitionPlan {
  std::vector<PartitionFlag> flags;
  std::vector<Leaf> leaves;  // preorder, matching the Single flags
  uint64_t payloadBits = 0;  // sum of per-leaf trial code lengths

  uint64_t flagBits() const { return 2 * flags.size(); }
  uint64_t cost() const { return payloadBits + flagBits(); }
};

// Code length of one leaf coded on its own with a fresh coder. `state` is
// advanced as if the leaf had been coded.
uint64_t trialLeafBits(
  const VoxelBlock& leaf, const OccupancyModel& model, RegionState& state);

// Rate-optimized recursive partitioning of a non-empty block at level
// `level`. A block may split while level < maxLevel and its children are at
// least 4 wide. Each node keeps whichever of "single block" and "split into
// octants" has the lower payload + 2 bits per flag; ties keep the single
// block. `state` is advanced along the chosen alternative.
PartitionPlan partitionBlock(
  const VoxelBlock& block, int level, int maxLevel,
  const OccupancyModel& model, RegionState& state);

// 2-bit symbols, most significant pair first, zero padded to a whole byte.
std::vector<uint8_t> packFlags(std::span<const PartitionFlag> flags);

struct ParsedFlags {
  std::vector<PartitionFlag> flags;
  std::vector<Leaf> leaves;
  std::size_t bytesConsumed = 0;
};

// Reads one flag tree for a block of side `topSide` at level 1. Rejects
// symbol 3, splits beyond maxLevel or below side 4, and a top-level 0.
ParsedFlags
parseFlags(std::span<const uint8_t> bytes, int topSide, int maxLevel);

void checkMaxLevel(int maxLevel);

}  // namespace vxpc
