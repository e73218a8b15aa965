#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace vxpc {

//============================================================================
// Grid coordinates. Lexicographic (x, y, z) order is the raster order used
// throughout the codec: z varies fastest.

struct Voxel {
  int32_t x = 0;
  int32_t y = 0;
  int32_t z = 0;

  friend auto operator<=>(const Voxel&, const Voxel&) = default;
};

// Raw point as read from a PLY file, before quantization.
struct Point3 {
  double x = 0;
  double y = 0;
  double z = 0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PointCloud {
  std::vector<Point3> points;
};

// Sorted, duplicate-free voxel coordinates.
using VoxelSet = std::vector<Voxel>;

constexpr int kMinDepth = 6;
constexpr int kMaxDepth = 24;
constexpr int kRegionSide = 64;
constexpr int kMinBlockSide = 4;

//============================================================================

std::size_t rasterIndex(int x, int y, int z, int side);
Voxel rasterCoords(std::size_t index, int side);

bool isValidBlockSide(int side);

// Dense binary occupancy cube addressed by raster index.
class VoxelBlock {
public:
  VoxelBlock() = default;
  explicit VoxelBlock(int side);

  int side() const { return side_; }
  std::size_t volume() const { return occupancy_.size(); }

  uint8_t operator[](std::size_t i) const { return occupancy_[i]; }
  uint8_t& operator[](std::size_t i) { return occupancy_[i]; }

  uint8_t at(int x, int y, int z) const
  {
    return occupancy_[rasterIndex(x, y, z, side_)];
  }
  void set(int x, int y, int z, bool occupied = true)
  {
    occupancy_[rasterIndex(x, y, z, side_)] = occupied ? 1 : 0;
  }

  std::span<const uint8_t> occupancy() const { return occupancy_; }
  std::size_t occupiedCount() const;
  bool empty() const { return occupiedCount() == 0; }

  // Copy of the child cube of half the side at octant (cx, cy, cz) in {0,1}.
  VoxelBlock child(int cx, int cy, int cz) const;
  // Generic cube extraction; origin and side must fit inside this block.
  VoxelBlock subBlock(Voxel origin, int side) const;
  void paste(const VoxelBlock& part, Voxel origin);

  friend bool operator==(const VoxelBlock&, const VoxelBlock&) = default;

private:
  int side_ = 0;
  std::vector<uint8_t> occupancy_;
};

struct BlockLocation {
  Voxel origin;
  int side = kRegionSide;

  friend auto operator<=>(const BlockLocation&, const BlockLocation&) = default;
};

struct LocatedBlock {
  BlockLocation location;
  VoxelBlock block;
};

//============================================================================

// Floors coordinates onto the 2^depth grid. Values above the grid clamp to
// 2^depth - 1; negative or non-finite coordinates are rejected.
VoxelSet voxelize(const PointCloud& cloud, int depth);
VoxelSet voxelize(std::span<const Voxel> voxels, int depth);

// One block per occupied cube of the given side, sorted by raster order of
// origin. The codec uses 64^3 regions; other power-of-two sides serve
// training data preparation.
std::vector<LocatedBlock>
extractBlocks(const VoxelSet& voxels, int depth, int side = kRegionSide);

// Inverse of extractBlocks; result is sorted and duplicate-free.
VoxelSet assembleBlocks(std::span<const LocatedBlock> blocks);

PointCloud toPointCloud(const VoxelSet& voxels);

void checkDepth(int depth);

}  // namespace vxpc
