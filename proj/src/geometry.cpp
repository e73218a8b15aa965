#include "geometry.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace vxpc {

//============================================================================

std::size_t
rasterIndex(int x, int y, int z, int side)
{
  if (x < 0 || y < 0 || z < 0 || x >= side || y >= side || z >= side)
    throw ArgumentError(
      "raster coordinates (" + std::to_string(x) + "," + std::to_string(y)
      + "," + std::to_string(z) + ") outside cube of side "
      + std::to_string(side));
  const auto d = static_cast<std::size_t>(side);
  return (static_cast<std::size_t>(x) * d + static_cast<std::size_t>(y)) * d
    + static_cast<std::size_t>(z);
}

Voxel
rasterCoords(std::size_t index, int side)
{
  const auto d = static_cast<std::size_t>(side);
  if (side <= 0 || index >= d * d * d)
    throw ArgumentError(
      "raster index " + std::to_string(index) + " outside cube of side "
      + std::to_string(side));
  Voxel v;
  v.z = static_cast<int32_t>(index % d);
  v.y = static_cast<int32_t>((index / d) % d);
  v.x = static_cast<int32_t>(index / (d * d));
  return v;
}

bool
isValidBlockSide(int side)
{
  return side >= kMinBlockSide && side <= kRegionSide
    && (side & (side - 1)) == 0;
}

void
checkDepth(int depth)
{
  if (depth < kMinDepth || depth > kMaxDepth)
    throw ArgumentError(
      "bit depth must be in [" + std::to_string(kMinDepth) + ", "
      + std::to_string(kMaxDepth) + "], got " + std::to_string(depth));
}

//============================================================================

VoxelBlock::VoxelBlock(int side) : side_(side)
{
  if (side <= 0)
    throw ArgumentError("block side must be positive");
  occupancy_.assign(static_cast<std::size_t>(side) * side * side, 0);
}

std::size_t
VoxelBlock::occupiedCount() const
{
  return static_cast<std::size_t>(
    std::count(occupancy_.begin(), occupancy_.end(), uint8_t(1)));
}

VoxelBlock
VoxelBlock::subBlock(Voxel origin, int side) const
{
  if (origin.x < 0 || origin.y < 0 || origin.z < 0
      || origin.x + side > side_ || origin.y + side > side_
      || origin.z + side > side_)
    throw ArgumentError("sub-block outside parent block");

  VoxelBlock out(side);
  for (int x = 0; x < side; x++)
    for (int y = 0; y < side; y++) {
      const auto src = rasterIndex(origin.x + x, origin.y + y, origin.z, side_);
      const auto dst = rasterIndex(x, y, 0, side);
      std::copy_n(&occupancy_[src], side, &out.occupancy_[dst]);
    }
  return out;
}

VoxelBlock
VoxelBlock::child(int cx, int cy, int cz) const
{
  const int half = side_ / 2;
  return subBlock({cx * half, cy * half, cz * half}, half);
}

void
VoxelBlock::paste(const VoxelBlock& part, Voxel origin)
{
  const int side = part.side();
  if (origin.x < 0 || origin.y < 0 || origin.z < 0
      || origin.x + side > side_ || origin.y + side > side_
      || origin.z + side > side_)
    throw ArgumentError("pasted block outside parent block");

  for (int x = 0; x < side; x++)
    for (int y = 0; y < side; y++) {
      const auto dst = rasterIndex(origin.x + x, origin.y + y, origin.z, side_);
      const auto src = rasterIndex(x, y, 0, side);
      std::copy_n(&part.occupancy_[src], side, &occupancy_[dst]);
    }
}

//============================================================================

namespace {

  int32_t quantizeCoordinate(double value, int depth, std::size_t pointIndex)
  {
    if (!std::isfinite(value) || value < 0.0)
      throw FormatError(
        "point " + std::to_string(pointIndex)
        + " has a negative or non-finite coordinate");
    const double maxCoord = std::ldexp(1.0, depth) - 1.0;
    return static_cast<int32_t>(std::min(std::floor(value), maxCoord));
  }

  void sortUnique(VoxelSet& voxels)
  {
    std::sort(voxels.begin(), voxels.end());
    voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());
  }

}  // namespace

VoxelSet
voxelize(const PointCloud& cloud, int depth)
{
  checkDepth(depth);
  VoxelSet out;
  out.reserve(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); i++) {
    const auto& p = cloud.points[i];
    out.push_back(
      {quantizeCoordinate(p.x, depth, i), quantizeCoordinate(p.y, depth, i),
       quantizeCoordinate(p.z, depth, i)});
  }
  sortUnique(out);
  return out;
}

VoxelSet
voxelize(std::span<const Voxel> voxels, int depth)
{
  checkDepth(depth);
  const int32_t maxCoord = (int32_t(1) << depth) - 1;
  VoxelSet out;
  out.reserve(voxels.size());
  for (std::size_t i = 0; i < voxels.size(); i++) {
    const auto& v = voxels[i];
    if (v.x < 0 || v.y < 0 || v.z < 0)
      throw FormatError(
        "voxel " + std::to_string(i) + " has a negative coordinate");
    out.push_back(
      {std::min(v.x, maxCoord), std::min(v.y, maxCoord),
       std::min(v.z, maxCoord)});
  }
  sortUnique(out);
  return out;
}

std::vector<LocatedBlock>
extractBlocks(const VoxelSet& voxels, int depth, int side)
{
  checkDepth(depth);
  const int32_t gridSide = int32_t(1) << depth;
  if (side < 1 || (side & (side - 1)) != 0 || side > gridSide)
    throw ArgumentError("block side must be a power of two within the grid");

  std::map<Voxel, VoxelBlock> regions;
  for (const auto& v : voxels) {
    if (v.x < 0 || v.y < 0 || v.z < 0 || v.x >= gridSide || v.y >= gridSide
        || v.z >= gridSide)
      throw ArgumentError("voxel outside the 2^depth grid");
    const Voxel origin{v.x & ~(side - 1), v.y & ~(side - 1), v.z & ~(side - 1)};
    auto it = regions.find(origin);
    if (it == regions.end())
      it = regions.emplace(origin, VoxelBlock(side)).first;
    it->second.set(v.x - origin.x, v.y - origin.y, v.z - origin.z);
  }

  std::vector<LocatedBlock> out;
  out.reserve(regions.size());
  for (auto& [origin, block] : regions)
    out.push_back({{origin, side}, std::move(block)});
  return out;
}

VoxelSet
assembleBlocks(std::span<const LocatedBlock> blocks)
{
  VoxelSet out;
  for (const auto& lb : blocks) {
    const auto& b = lb.block;
    for (std::size_t i = 0; i < b.volume(); i++) {
      if (!b[i])
        continue;
      const Voxel local = rasterCoords(i, b.side());
      out.push_back(
        {lb.location.origin.x + local.x, lb.location.origin.y + local.y,
         lb.location.origin.z + local.z});
    }
  }
  sortUnique(out);
  return out;
}

PointCloud
toPointCloud(const VoxelSet& voxels)
{
  PointCloud pc;
  pc.points.reserve(voxels.size());
  for (const auto& v : voxels)
    pc.points.push_back({double(v.x), double(v.y), double(v.z)});
  return pc;
}

}  // namespace vxpc
