#pragma once

#include "entropy.hpp"
#include "geometry.hpp"
#include "neural.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace vxpc {

enum class ModelId : uint8_t
{
  Uniform = 0,
  AdaptiveLaplace = 1,
  VoxelDnn = 2,
};

const char* modelName(ModelId id);

// Statistics shared by the leaves of one 64^3 region, in coding order.
// Only the adaptive model reads or writes them.
struct RegionState {
  uint64_t zeros = 0;
  uint64_t ones = 0;

  friend bool operator==(const RegionState&, const RegionState&) = default;
};

// Sequential probability source for one leaf block. Callers alternate
// probability(i) and update(i, bit) for i = 0, 1, ... in raster order.
class LeafPredictor {
public:
  virtual ~LeafPredictor() = default;
  virtual uint32_t probability(std::size_t index) = 0;
  virtual void update(std::size_t index, bool bit) = 0;
};

// p(v_i = 1 | v_1 .. v_{i-1}) provider behind the coder.
//
//  - uniform:  1/2 for every voxel
//  - adaptive: Laplace estimate (n1 + 1) / (n0 + n1 + 2) over the voxels
//              coded so far in the current 64^3 region
//  - voxeldnn: clamped softmax output of a masked-convolution network
class OccupancyModel {
public:
  static OccupancyModel uniform();
  static OccupancyModel adaptive();
  static OccupancyModel neural(Network<float> network);

  ModelId id() const { return id_; }
  // Identifies the weights a container was coded with; 0 for non-neural.
  uint64_t checksum() const { return checksum_; }
  const Network<float>* network() const { return network_.get(); }

  // The encoder may see the whole leaf up front; a neural model then needs
  // one forward pass, which yields the same values as sequential evaluation
  // because the network is causal.
  std::unique_ptr<LeafPredictor>
  encoderPredictor(const VoxelBlock& leaf, RegionState& state) const;

  // Decoder side: probabilities from the partially decoded leaf only.
  std::unique_ptr<LeafPredictor>
  decoderPredictor(int side, RegionState& state) const;

private:
  ModelId id_ = ModelId::Uniform;
  std::shared_ptr<const Network<float>> network_;
  uint64_t checksum_ = 0;
};

// Probability of a one as handed to the coder.
uint32_t adaptiveProbability(const RegionState& state);

// Codes all side^3 occupancy bits of `leaf` in raster order. `trace`, when
// given, receives the quantized probability of every coded symbol.
void encodeSingleBlock(
  const VoxelBlock& leaf, const OccupancyModel& model, RegionState& state,
  BinaryEncoder& encoder, std::vector<uint32_t>* trace = nullptr);

VoxelBlock decodeSingleBlock(
  BinaryDecoder& decoder, int side, const OccupancyModel& model,
  RegionState& state, std::vector<uint32_t>* trace = nullptr);

}  // namespace vxpc
