#include "partition.hpp"

#include "errors.hpp"

#include <string>

namespace vxpc {

int
sideAtLevel(int topSide, int level)
{
  return topSide >> (level - 1);
}

void
checkMaxLevel(int maxLevel)
{
  if (maxLevel < 1 || maxLevel > kMaxPartitionLevel)
    throw ArgumentError(
      "max partition level must be in [1, 5], got " + std::to_string(maxLevel));
}

uint64_t
trialLeafBits(
  const VoxelBlock& leaf, const OccupancyModel& model, RegionState& state)
{
  BinaryEncoder trial;
  encodeSingleBlock(leaf, model, state, trial);
  return trial.bitsEmitted();
}

namespace {

  PartitionPlan partitionAt(
    const VoxelBlock& block, Voxel origin, int level, int maxLevel,
    const OccupancyModel& model, RegionState& state)
  {
    RegionState singleState = state;
    PartitionPlan single;
    single.flags = {PartitionFlag::Single};
    single.leaves = {{origin, block.side()}};
    single.payloadBits = trialLeafBits(block, model, singleState);

    const bool canSplit =
      level < maxLevel && block.side() / 2 >= kMinBlockSide;
    if (!canSplit) {
      state = singleState;
      return single;
    }

    RegionState splitState = state;
    PartitionPlan split;
    split.flags = {PartitionFlag::Split};
    const int half = block.side() / 2;
    for (int cx = 0; cx < 2; cx++)
      for (int cy = 0; cy < 2; cy++)
        for (int cz = 0; cz < 2; cz++) {
          const VoxelBlock child = block.child(cx, cy, cz);
          if (child.empty()) {
            split.flags.push_back(PartitionFlag::Empty);
            continue;
          }
          const Voxel childOrigin{
            origin.x + cx * half, origin.y + cy * half, origin.z + cz * half};
          auto sub = partitionAt(
            child, childOrigin, level + 1, maxLevel, model, splitState);
          split.flags.insert(split.flags.end(), sub.flags.begin(), sub.flags.end());
          split.leaves.insert(
            split.leaves.end(), sub.leaves.begin(), sub.leaves.end());
          split.payloadBits += sub.payloadBits;
        }

    if (split.cost() >= single.cost()) {
      state = singleState;
      return single;
    }
    state = splitState;
    return split;
  }

}  // namespace

PartitionPlan
partitionBlock(
  const VoxelBlock& block, int level, int maxLevel,
  const OccupancyModel& model, RegionState& state)
{
  checkMaxLevel(maxLevel);
  if (level < 1 || level > maxLevel)
    throw ArgumentError("partition level outside [1, maxLevel]");
  if (!isValidBlockSide(block.side()))
    throw ArgumentError("block side must be a power of two in [4, 64]");
  if (block.empty())
    throw ArgumentError("cannot partition an empty block");
  return partitionAt(block, {0, 0, 0}, level, maxLevel, model, state);
}

//============================================================================

std::vector<uint8_t>
packFlags(std::span<const PartitionFlag> flags)
{
  std::vector<uint8_t> out((flags.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < flags.size(); i++)
    out[i / 4] |= uint8_t(static_cast<uint8_t>(flags[i]) << (6 - 2 * (i % 4)));
  return out;
}

namespace {

  class FlagReader {
  public:
    explicit FlagReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

    uint8_t next()
    {
      const std::size_t byte = count_ / 4;
      if (byte >= bytes_.size())
        throw FormatError("truncated partition flags", byte);
      const uint8_t v = (bytes_[byte] >> (6 - 2 * (count_ % 4))) & 3;
      count_++;
      return v;
    }

    std::size_t symbolIndex() const { return count_; }
    std::size_t bytesConsumed() const { return (count_ + 3) / 4; }

  private:
    std::span<const uint8_t> bytes_;
    std::size_t count_ = 0;
  };

  void parseNode(
    FlagReader& r, ParsedFlags& out, Voxel origin, int side, int level,
    int maxLevel, uint8_t flag)
  {
    out.flags.push_back(static_cast<PartitionFlag>(flag));
    if (flag == 1) {
      out.leaves.push_back({origin, side});
      return;
    }
    // flag == 2
    if (level >= maxLevel || side / 2 < kMinBlockSide)
      throw FormatError(
        "split flag at a block that cannot be split (side "
          + std::to_string(side) + ")",
        r.symbolIndex() / 4);
    const int half = side / 2;
    for (int k = 0; k < 8; k++) {
      const std::size_t at = r.symbolIndex();
      const uint8_t child = r.next();
      if (child == 3)
        throw FormatError("invalid partition flag 3", at / 4);
      if (child == 0) {
        out.flags.push_back(PartitionFlag::Empty);
        continue;
      }
      const Voxel o{
        origin.x + ((k >> 2) & 1) * half, origin.y + ((k >> 1) & 1) * half,
        origin.z + (k & 1) * half};
      parseNode(r, out, o, half, level + 1, maxLevel, child);
    }
  }

}  // namespace

ParsedFlags
parseFlags(std::span<const uint8_t> bytes, int topSide, int maxLevel)
{
  checkMaxLevel(maxLevel);
  FlagReader r(bytes);
  ParsedFlags out;
  const uint8_t top = r.next();
  if (top == 3)
    throw FormatError("invalid partition flag 3", 0);
  if (top == 0)
    throw FormatError("occupied block signalled as empty", 0);
  parseNode(r, out, {0, 0, 0}, topSide, 1, maxLevel, top);
  out.bytesConsumed = r.bytesConsumed();
  return out;
}

}  // namespace vxpc
