#pragma once

#include "neural.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vxpc {

// Weight file layout, all integers little-endian:
//
//   "VXDN"  u8 version (1)  u32 layer_count
//   per layer: u8 role  u8 mask  u8 kernel  u32 in  u32 out  u8 activation
//              f32 weights[out][in][kernel^3]  f32 biases[out]
//   u64 checksum: FNV-1a 64 of every preceding byte
constexpr uint8_t kWeightFileVersion = 1;

uint64_t fnv1a64(std::span<const uint8_t> bytes);

std::vector<uint8_t> serializeWeights(const Network<float>& network);

struct LoadedWeights {
  Network<float> network;
  uint64_t checksum = 0;
};

LoadedWeights parseWeights(std::span<const uint8_t> bytes);
LoadedWeights loadWeights(const std::string& path);
void saveWeights(const std::string& path, const Network<float>& network);

// Checksum a container records for a network: that of its serialized form.
uint64_t weightsChecksum(const Network<float>& network);

}  // namespace vxpc
