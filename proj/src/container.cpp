#include "container.hpp"

#include "bytes.hpp"
#include "errors.hpp"
#include "octree.hpp"
#include "parallel.hpp"

#include <chrono>
#include <string>

namespace vxpc {

namespace {

  struct EncodedRegion {
    std::vector<uint8_t> flagBytes;
    std::vector<uint8_t> codeword;
    BlockReport report;
  };

  EncodedRegion encodeRegion(
    const LocatedBlock& region, int maxLevel, const OccupancyModel& model)
  {
    RegionState planState;
    const auto plan =
      partitionBlock(region.block, 1, maxLevel, model, planState);

    RegionState state;
    BinaryEncoder encoder;
    for (const auto& leaf : plan.leaves) {
      const VoxelBlock part =
        leaf.side == region.block.side()
        ? region.block
        : region.block.subBlock(leaf.origin, leaf.side);
      encodeSingleBlock(part, model, state, encoder);
    }

    EncodedRegion out;
    out.flagBytes = packFlags(plan.flags);
    out.codeword = encoder.flush();
    out.report.location = region.location;
    out.report.occupiedVoxels = region.block.occupiedCount();
    out.report.leafCount = plan.leaves.size();
    for (const auto& leaf : plan.leaves)
      out.report.codedVoxels += std::size_t(leaf.side) * leaf.side * leaf.side;
    out.report.flagCount = plan.flags.size();
    out.report.flagBytes = out.flagBytes.size();
    out.report.payloadBytes = out.codeword.size();
    out.report.optimizedCost = plan.cost();
    return out;
  }

  void writeHeader(ByteWriter& w, const ContainerHeader& h)
  {
    w.bytes({'V', 'X', 'P', 'C'});
    w.u8(h.version);
    w.u8(static_cast<uint8_t>(h.depth));
    w.u8(static_cast<uint8_t>(h.maxLevel));
    w.u8(static_cast<uint8_t>(h.model));
    w.u64(h.modelChecksum);
  }

}  // namespace

ContainerHeader
readContainerHeader(std::span<const uint8_t> bytes)
{
  ByteReader r(bytes);
  if (!r.expectMagic("VXPC"))
    throw FormatError("bad container magic", 0);
  ContainerHeader h;
  h.version = r.u8();
  if (h.version != kContainerVersion)
    throw FormatError(
      "unsupported container version " + std::to_string(h.version), 4);
  h.depth = r.u8();
  if (h.depth < kMinDepth || h.depth > kMaxDepth)
    throw FormatError("container depth out of range", 5);
  h.maxLevel = r.u8();
  if (h.maxLevel < 1 || h.maxLevel > kMaxPartitionLevel)
    throw FormatError("container max level out of range", 6);
  const uint8_t model = r.u8();
  if (model > 2)
    throw FormatError("unknown model id " + std::to_string(model), 7);
  h.model = static_cast<ModelId>(model);
  h.modelChecksum = r.u64();
  if (h.model != ModelId::VoxelDnn && h.modelChecksum != 0)
    throw FormatError("non-neural container carries a model checksum", 8);
  return h;
}

EncodeResult
encodeVoxels(
  const VoxelSet& voxels, const EncodeOptions& opt, const OccupancyModel& model)
{
  const auto start = std::chrono::steady_clock::now();
  checkDepth(opt.depth);
  checkMaxLevel(opt.maxLevel);
  if (voxels.empty())
    throw ArgumentError("cannot encode an empty point cloud");

  const auto regions = extractBlocks(voxels, opt.depth);
  std::vector<BlockLocation> origins;
  origins.reserve(regions.size());
  for (const auto& r : regions)
    origins.push_back(r.location);
  const auto octree = serializeOctree(buildOctree(origins, opt.depth));

  std::vector<EncodedRegion> encoded(regions.size());
  parallelFor(regions.size(), opt.threads, [&](std::size_t i) {
    encoded[i] = encodeRegion(regions[i], opt.maxLevel, model);
  });

  ContainerHeader h;
  h.depth = opt.depth;
  h.maxLevel = opt.maxLevel;
  h.model = model.id();
  h.modelChecksum = model.checksum();

  ByteWriter w;
  writeHeader(w, h);
  w.u32(static_cast<uint32_t>(octree.size()));
  w.bytes(octree);

  EncodeResult result;
  for (auto& e : encoded) {
    w.bytes(e.flagBytes);
    w.u32(static_cast<uint32_t>(e.codeword.size()));
    w.bytes(e.codeword);
    result.blocks.push_back(e.report);
  }
  result.container = w.take();
  result.occupiedVoxels = voxels.size();
  result.octreeBytes = octree.size();
  result.seconds = std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return result;
}

EncodeResult
encodePointCloud(
  const PointCloud& cloud, const EncodeOptions& opt, const OccupancyModel& model)
{
  return encodeVoxels(voxelize(cloud, opt.depth), opt, model);
}

DecodeResult
decodeContainer(
  std::span<const uint8_t> bytes, const OccupancyModel* neuralModel,
  int threads)
{
  DecodeResult result;
  result.header = readContainerHeader(bytes);
  const auto& h = result.header;

  OccupancyModel model;
  switch (h.model) {
  case ModelId::Uniform: model = OccupancyModel::uniform(); break;
  case ModelId::AdaptiveLaplace: model = OccupancyModel::adaptive(); break;
  case ModelId::VoxelDnn:
    if (!neuralModel || neuralModel->id() != ModelId::VoxelDnn)
      throw ArgumentError("container was coded with voxeldnn; weights required");
    if (neuralModel->checksum() != h.modelChecksum)
      throw FormatError("model checksum mismatch: container was coded with "
                        "different weights");
    model = *neuralModel;
    break;
  }

  ByteReader r(bytes.subspan(kContainerHeaderBytes));
  const uint32_t octreeLength = r.u32();
  const auto octreeBytes = r.bytes(octreeLength);
  const auto tree = parseOctree(octreeBytes, h.depth);
  if (tree.bytesConsumed != octreeLength)
    throw FormatError(
      "octree length prefix disagrees with its content",
      kContainerHeaderBytes);

  struct RegionSlice {
    std::vector<Leaf> leaves;
    std::span<const uint8_t> codeword;
  };
  std::vector<RegionSlice> slices(tree.origins.size());
  for (auto& slice : slices) {
    const std::size_t at = kContainerHeaderBytes + r.offset();
    const auto rest = bytes.subspan(at);
    ParsedFlags flags;
    try {
      flags = parseFlags(rest, kRegionSide, h.maxLevel);
    } catch (const FormatError& e) {
      throw FormatError(
        e.detail() + " in region flags", at + e.offset());
    }
    r.bytes(flags.bytesConsumed);
    const uint32_t length = r.u32();
    slice.codeword = r.bytes(length);
    slice.leaves = std::move(flags.leaves);
  }
  if (r.remaining() != 0)
    throw FormatError(
      "trailing bytes after last region", kContainerHeaderBytes + r.offset());

  std::vector<LocatedBlock> regions(slices.size());
  parallelFor(slices.size(), threads, [&](std::size_t i) {
    VoxelBlock block(kRegionSide);
    RegionState state;
    BinaryDecoder decoder(slices[i].codeword);
    for (const auto& leaf : slices[i].leaves) {
      const auto part = decodeSingleBlock(decoder, leaf.side, model, state);
      block.paste(part, leaf.origin);
    }
    regions[i] = {tree.origins[i], std::move(block)};
  });

  result.voxels = assembleBlocks(regions);
  return result;
}

double
bpov(uint64_t totalBits, uint64_t occupiedVoxels)
{
  if (occupiedVoxels == 0)
    throw ArgumentError("bpov is undefined for zero occupied voxels");
  return double(totalBits) / double(occupiedVoxels);
}

}  // namespace vxpc
