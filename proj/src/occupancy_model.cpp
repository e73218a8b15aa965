#include "occupancy_model.hpp"

#include "errors.hpp"
#include "weights.hpp"

#include <algorithm>
#include <string>

namespace vxpc {

const char*
modelName(ModelId id)
{
  switch (id) {
  case ModelId::Uniform: return "uniform";
  case ModelId::AdaptiveLaplace: return "adaptive";
  case ModelId::VoxelDnn: return "voxeldnn";
  }
  return "unknown";
}

uint32_t
adaptiveProbability(const RegionState& s)
{
  // round(65536 * (n1 + 1) / (n0 + n1 + 2)) in integers.
  const uint64_t total = s.zeros + s.ones + 2;
  const uint64_t q = ((s.ones + 1) * 2 * kProbabilityOne + total) / (2 * total);
  return static_cast<uint32_t>(
    std::clamp<uint64_t>(q, kMinProbability, kMaxProbability));
}

namespace {

  constexpr uint32_t kHalf = kProbabilityOne / 2;

  class UniformPredictor final : public LeafPredictor {
  public:
    uint32_t probability(std::size_t) override { return kHalf; }
    void update(std::size_t, bool) override {}
  };

  class AdaptivePredictor final : public LeafPredictor {
  public:
    explicit AdaptivePredictor(RegionState& state) : state_(state) {}

    uint32_t probability(std::size_t) override
    {
      return adaptiveProbability(state_);
    }
    void update(std::size_t, bool bit) override
    {
      if (bit)
        state_.ones++;
      else
        state_.zeros++;
    }

  private:
    RegionState& state_;
  };

  uint32_t toCoderProbability(float p1)
  {
    return quantizeProbability(clampProbability(double(p1)));
  }

  class NeuralEncoderPredictor final : public LeafPredictor {
  public:
    NeuralEncoderPredictor(const Network<float>& net, const VoxelBlock& leaf)
    {
      const auto field = forwardProbabilities(net, leaf);
      q_.reserve(field.size());
      for (const auto& p : field)
        q_.push_back(toCoderProbability(p.p1));
    }

    uint32_t probability(std::size_t index) override { return q_.at(index); }
    void update(std::size_t, bool) override {}

  private:
    std::vector<uint32_t> q_;
  };

  // Evaluates each layer at one position per step; the activations needed
  // at position i are exactly those at positions <= i, all of which depend
  // only on already decoded voxels.
  class NeuralDecoderPredictor final : public LeafPredictor {
  public:
    NeuralDecoderPredictor(const Network<float>& net, int side)
      : ev_(net, side)
    {}

    uint32_t probability(std::size_t index) override
    {
      ev_.evaluateAt(index);
      return toCoderProbability(ev_.probabilityAt(index).p1);
    }
    void update(std::size_t index, bool bit) override
    {
      ev_.setVoxel(index, bit);
    }

  private:
    BlockEvaluator<float> ev_;
  };

}  // namespace

OccupancyModel
OccupancyModel::uniform()
{
  OccupancyModel m;
  m.id_ = ModelId::Uniform;
  return m;
}

OccupancyModel
OccupancyModel::adaptive()
{
  OccupancyModel m;
  m.id_ = ModelId::AdaptiveLaplace;
  return m;
}

OccupancyModel
OccupancyModel::neural(Network<float> network)
{
  OccupancyModel m;
  m.id_ = ModelId::VoxelDnn;
  m.checksum_ = weightsChecksum(network);
  m.network_ = std::make_shared<const Network<float>>(std::move(network));
  return m;
}

std::unique_ptr<LeafPredictor>
OccupancyModel::encoderPredictor(const VoxelBlock& leaf, RegionState& state) const
{
  switch (id_) {
  case ModelId::Uniform: return std::make_unique<UniformPredictor>();
  case ModelId::AdaptiveLaplace:
    return std::make_unique<AdaptivePredictor>(state);
  case ModelId::VoxelDnn:
    return std::make_unique<NeuralEncoderPredictor>(*network_, leaf);
  }
  throw ArgumentError("unknown occupancy model");
}

std::unique_ptr<LeafPredictor>
OccupancyModel::decoderPredictor(int side, RegionState& state) const
{
  switch (id_) {
  case ModelId::Uniform: return std::make_unique<UniformPredictor>();
  case ModelId::AdaptiveLaplace:
    return std::make_unique<AdaptivePredictor>(state);
  case ModelId::VoxelDnn:
    return std::make_unique<NeuralDecoderPredictor>(*network_, side);
  }
  throw ArgumentError("unknown occupancy model");
}

//============================================================================

void
encodeSingleBlock(
  const VoxelBlock& leaf, const OccupancyModel& model, RegionState& state,
  BinaryEncoder& encoder, std::vector<uint32_t>* trace)
{
  if (!isValidBlockSide(leaf.side()))
    throw ArgumentError(
      "leaf side must be a power of two in [4, 64], got "
      + std::to_string(leaf.side()));
  auto predictor = model.encoderPredictor(leaf, state);
  for (std::size_t i = 0; i < leaf.volume(); i++) {
    const bool bit = leaf[i] != 0;
    const uint32_t q = predictor->probability(i);
    if (trace)
      trace->push_back(q);
    encoder.encodeBit(bit, q);
    predictor->update(i, bit);
  }
}

VoxelBlock
decodeSingleBlock(
  BinaryDecoder& decoder, int side, const OccupancyModel& model,
  RegionState& state, std::vector<uint32_t>* trace)
{
  if (!isValidBlockSide(side))
    throw FormatError("invalid leaf side " + std::to_string(side));
  VoxelBlock leaf(side);
  auto predictor = model.decoderPredictor(side, state);
  for (std::size_t i = 0; i < leaf.volume(); i++) {
    const uint32_t q = predictor->probability(i);
    if (trace)
      trace->push_back(q);
    const bool bit = decoder.decodeBit(q);
    leaf[i] = bit ? 1 : 0;
    predictor->update(i, bit);
  }
  return leaf;
}

}  // namespace vxpc
