#pragma once

#include "geometry.hpp"
#include "occupancy_model.hpp"
#include "partition.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vxpc {

// Container layout, integers little-endian:
//
//   "VXPC"  u8 version  u8 depth  u8 max_level  u8 model_id  u64 model_checksum
//   u32 octree_length  octree bytes
//   per occupied 64^3 region, in raster order of origin:
//     partition flags (2-bit packed, zero padded to a byte)
//     u32 codeword_length  codeword
//
// A region's codeword covers all of its leaves in flag preorder.
constexpr uint8_t kContainerVersion = 1;
constexpr std::size_t kContainerHeaderBytes = 16;

struct ContainerHeader {
  uint8_t version = kContainerVersion;
  int depth = kMinDepth;
  int maxLevel = 1;
  ModelId model = ModelId::Uniform;
  uint64_t modelChecksum = 0;
};

ContainerHeader readContainerHeader(std::span<const uint8_t> bytes);

struct EncodeOptions {
  int depth = 10;
  int maxLevel = 1;
  int threads = 1;
};

struct BlockReport {
  BlockLocation location;
  std::size_t occupiedVoxels = 0;
  std::size_t leafCount = 0;
  std::size_t codedVoxels = 0;  // total leaf volume
  std::size_t flagCount = 0;
  std::size_t flagBytes = 0;     // packed, including padding
  std::size_t payloadBytes = 0;  // codeword only
  uint64_t optimizedCost = 0;    // partitioner's cost estimate in bits

  // Flags + length prefix + codeword.
  std::size_t totalBytes() const { return flagBytes + 4 + payloadBytes; }
};

struct EncodeResult {
  std::vector<uint8_t> container;
  std::vector<BlockReport> blocks;
  std::size_t occupiedVoxels = 0;
  std::size_t octreeBytes = 0;
  double seconds = 0;

  uint64_t totalBits() const { return 8 * uint64_t(container.size()); }
};

EncodeResult encodeVoxels(
  const VoxelSet& voxels, const EncodeOptions& options,
  const OccupancyModel& model);

// Voxelizes, then encodes.
EncodeResult encodePointCloud(
  const PointCloud& cloud, const EncodeOptions& options,
  const OccupancyModel& model);

struct DecodeResult {
  ContainerHeader header;
  VoxelSet voxels;
};

// `neuralModel` supplies the weights when the container was coded with the
// neural model; its checksum must match the one recorded in the header.
DecodeResult decodeContainer(
  std::span<const uint8_t> container, const OccupancyModel* neuralModel,
  int threads = 1);

// Bits per occupied voxel.
double bpov(uint64_t totalBits, uint64_t occupiedVoxels);

}  // namespace vxpc
