#pragma once

#include "geometry.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace vxpc {

enum class MaskType : uint8_t
{
  None = 0,
  A = 1,  // taps strictly before the center in raster order
  B = 2,  // taps up to and including the center
};

enum class Activation : uint8_t
{
  None = 0,
  Relu = 1,
};

// Residual wiring: the input of a ResidualOpen layer is added to the
// pre-activation output of the next ResidualClose layer.
enum class LayerRole : uint8_t
{
  Plain = 0,
  ResidualOpen = 1,
  ResidualClose = 2,
};

// k^3 entries in kernel raster order, 1 where the tap is live.
std::vector<uint8_t> makeMask(int kernel, MaskType type);

template<typename Real>
struct ConvLayer {
  LayerRole role = LayerRole::Plain;
  MaskType mask = MaskType::None;
  int kernel = 1;
  int inChannels = 1;
  int outChannels = 1;
  Activation activation = Activation::None;
  std::vector<Real> weights;  // (out, in, kernel^3)
  std::vector<Real> biases;   // out

  int taps() const { return kernel * kernel * kernel; }
  std::size_t weightIndex(int out, int in, int tap) const
  {
    return (std::size_t(out) * inChannels + in) * taps() + tap;
  }
  std::size_t parameterCount() const { return weights.size() + biases.size(); }
};

struct ArchitectureConfig {
  int firstKernel = 7;
  int filters = 64;
  int residualBlocks = 2;
  int bottleneck = 32;
  int residualKernel = 5;
  int headChannels = 64;
};

// 7^3 mask-A stem with 64 filters, two 64-32-64 residual blocks with 5^3
// mask-B cores, and a 64-64-2 pointwise head.
ArchitectureConfig referenceArchitecture();
// Same topology at desk scale: 8 filters, k3, one 8-4-8 block, 8-8-2 head.
ArchitectureConfig tinyArchitecture();

// Layer stack of 3D masked convolutions ending in two logits per voxel.
//
// Causality is validated on construction: the first layer is mask A and
// every later layer with a kernel wider than 1 is masked. Together with zero
// padding this makes the output at raster index i depend only on voxels < i.
template<typename Real>
class Network {
public:
  Network() = default;
  explicit Network(std::vector<ConvLayer<Real>> layers);

  static Network build(const ArchitectureConfig& config, uint64_t seed);

  const std::vector<ConvLayer<Real>>& layers() const { return layers_; }
  // Weight/bias values may be edited in place; the topology may not.
  std::vector<ConvLayer<Real>>& mutableLayers() { return layers_; }

  std::size_t parameterCount() const;

  // Same topology with every parameter set to zero.
  Network zerosLike() const;

  template<typename To>
  Network<To> cast() const
  {
    std::vector<ConvLayer<To>> out;
    out.reserve(layers_.size());
    for (const auto& l : layers_) {
      ConvLayer<To> c;
      c.role = l.role;
      c.mask = l.mask;
      c.kernel = l.kernel;
      c.inChannels = l.inChannels;
      c.outChannels = l.outChannels;
      c.activation = l.activation;
      c.weights.assign(l.weights.begin(), l.weights.end());
      c.biases.assign(l.biases.begin(), l.biases.end());
      out.push_back(std::move(c));
    }
    return Network<To>(std::move(out));
  }

private:
  std::vector<ConvLayer<Real>> layers_;
};

template<typename Real>
struct ProbabilityPair {
  Real p0;
  Real p1;
};

//============================================================================
// Dense per-block evaluation.
//
// Activations are stored position-major (channels last). For every output
// value the accumulation order is fixed: bias, then live taps in kernel
// raster order with input channels innermost, then the residual input, then
// the activation. The whole-block pass and the per-position pass share one
// code path, so they agree bit-for-bit.

template<typename Real>
class BlockEvaluator {
public:
  BlockEvaluator(const Network<Real>& network, int side);
  ~BlockEvaluator();
  BlockEvaluator(BlockEvaluator&&) noexcept;
  BlockEvaluator& operator=(BlockEvaluator&&) noexcept;

  int side() const { return side_; }
  std::size_t volume() const { return volume_; }

  // Loads occupancy; rejects values other than 0 and 1.
  void setInput(const VoxelBlock& block);
  void clearInput();
  void setVoxel(std::size_t index, bool occupied);

  // Evaluates every layer over the whole block.
  void evaluateAll();

  // Evaluates every layer at one position only. Requires that all positions
  // before `index` were evaluated after their inputs were set; the input
  // voxel at `index` itself is never read.
  void evaluateAt(std::size_t index);

  std::vector<ProbabilityPair<Real>> probabilities() const;
  ProbabilityPair<Real> probabilityAt(std::size_t index) const;
  std::span<const Real> logits() const;

  // Sum of -log2 softmax(logits)[v_i] over the block, unclamped, and its
  // gradient with respect to every parameter (added into `gradients`).
  // Requires a preceding evaluateAll() on the same input.
  double lossBits() const;
  void accumulateGradients(Network<Real>& gradients) const;

private:
  struct Impl;

  int side_;
  std::size_t volume_;
  std::unique_ptr<Impl> impl_;
};

template<typename Real>
std::vector<ProbabilityPair<Real>>
forwardProbabilities(const Network<Real>& network, const VoxelBlock& block);

// Probabilities are clamped to [2^-16, 1 - 2^-16].
double clampProbability(double p);

template<typename Real>
double crossEntropyBits(
  std::span<const ProbabilityPair<Real>> field, const VoxelBlock& block);

extern template class Network<float>;
extern template class Network<double>;
extern template class BlockEvaluator<float>;
extern template class BlockEvaluator<double>;

}  // namespace vxpc
