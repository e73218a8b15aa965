#pragma once

#include "neural.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vxpc {

struct AdamConfig {
  double learningRate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moment estimates, shaped like the network.
struct AdamState {
  Network<double> firstMoment;
  Network<double> secondMoment;
  uint64_t step = 0;

  static AdamState forNetwork(const Network<double>& network);
};

void adamStep(
  Network<double>& network, const Network<double>& gradients,
  AdamState& state, const AdamConfig& config = {});

// Loss (bits) and gradient of one block, added into `gradients`.
double accumulateBlockGradient(
  const Network<double>& network, const VoxelBlock& block,
  Network<double>& gradients);

struct TrainingConfig {
  int epochs = 1;
  int batchSize = 8;
  uint64_t seed = 1;
  bool shuffle = true;
  AdamConfig adam;
};

struct TrainingHistory {
  // Mean cross-entropy per block in bits, one entry per epoch.
  std::vector<double> epochMeanBits;
};

// Mini-batch training on the mean block cross-entropy. Deterministic for a
// fixed seed and block order.
TrainingHistory train(
  Network<double>& network, std::span<const VoxelBlock> blocks,
  const TrainingConfig& config);

}  // namespace vxpc
