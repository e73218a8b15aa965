#pragma once

#include "geometry.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace vxpc {

enum class SynthShape
{
  Sphere,  // shell of radius 0.4 * 2^depth about the grid center
  Plane,   // z in [2^(depth-1), 2^(depth-1) + 2): a two-voxel slab
  Random,  // uniform in the grid
};

std::optional<SynthShape> parseSynthShape(std::string_view name);

// Exactly `count` points, before voxelization. Coordinates are float32
// values so that PLY round trips preserve them.
PointCloud synthesize(SynthShape shape, int depth, std::size_t count, uint64_t seed);

// VXPC_SEED when set and numeric, otherwise `fallback`.
uint64_t defaultSeed(uint64_t fallback = 1);

}  // namespace vxpc
