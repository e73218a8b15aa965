#include "training.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace vxpc {

AdamState
AdamState::forNetwork(const Network<double>& network)
{
  return {network.zerosLike(), network.zerosLike(), 0};
}

namespace {

  template<typename Fn>
  void forEachParameterArray(
    Network<double>& net, const Network<double>& grads, AdamState& st, Fn fn)
  {
    auto& layers = net.mutableLayers();
    const auto& g = grads.layers();
    auto& m = st.firstMoment.mutableLayers();
    auto& v = st.secondMoment.mutableLayers();
    if (g.size() != layers.size() || m.size() != layers.size())
      throw ArgumentError("optimizer state does not match network");
    for (std::size_t l = 0; l < layers.size(); l++) {
      fn(layers[l].weights, g[l].weights, m[l].weights, v[l].weights);
      fn(layers[l].biases, g[l].biases, m[l].biases, v[l].biases);
    }
  }

}  // namespace

void
adamStep(
  Network<double>& network, const Network<double>& gradients,
  AdamState& state, const AdamConfig& cfg)
{
  state.step++;
  const double t = double(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);

  forEachParameterArray(
    network, gradients, state,
    [&](std::vector<double>& p, const std::vector<double>& g,
        std::vector<double>& m, std::vector<double>& v) {
      if (g.size() != p.size())
        throw ArgumentError("gradient shape does not match network");
      for (std::size_t i = 0; i < p.size(); i++) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double mHat = m[i] / c1;
        const double vHat = v[i] / c2;
        p[i] -= cfg.learningRate * mHat / (std::sqrt(vHat) + cfg.epsilon);
      }
    });
}

double
accumulateBlockGradient(
  const Network<double>& network, const VoxelBlock& block,
  Network<double>& gradients)
{
  BlockEvaluator<double> ev(network, block.side());
  ev.setInput(block);
  ev.evaluateAll();
  ev.accumulateGradients(gradients);
  return ev.lossBits();
}

namespace {

  void scaleNetwork(Network<double>& net, double factor)
  {
    for (auto& l : net.mutableLayers()) {
      for (auto& w : l.weights)
        w *= factor;
      for (auto& b : l.biases)
        b *= factor;
    }
  }

}  // namespace

TrainingHistory
train(
  Network<double>& network, std::span<const VoxelBlock> blocks,
  const TrainingConfig& cfg)
{
  if (cfg.epochs < 0 || cfg.batchSize < 1)
    throw ArgumentError("epochs must be >= 0 and batch size >= 1");

  TrainingHistory history;
  if (blocks.empty())
    return history;

  AdamState state = AdamState::forNetwork(network);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), std::size_t(0));

  for (int epoch = 0; epoch < cfg.epochs; epoch++) {
    if (cfg.shuffle) {
      // Fisher-Yates with an explicit draw so the order does not depend on
      // the standard library's distribution implementation.
      for (std::size_t i = order.size() - 1; i > 0; i--) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
      }
    }

    double epochBits = 0;
    for (std::size_t start = 0; start < order.size();
         start += std::size_t(cfg.batchSize)) {
      const std::size_t end =
        std::min(order.size(), start + std::size_t(cfg.batchSize));
      Network<double> grads = network.zerosLike();
      for (std::size_t k = start; k < end; k++)
        epochBits += accumulateBlockGradient(network, blocks[order[k]], grads);
      scaleNetwork(grads, 1.0 / double(end - start));
      adamStep(network, grads, state, cfg.adam);
    }
    history.epochMeanBits.push_back(epochBits / double(blocks.size()));
  }
  return history;
}

}  // namespace vxpc
