#pragma once

// Shared generators and independent reference implementations for tests.

#include "entropy.hpp"
#include "geometry.hpp"
#include "neural.hpp"
#include "occupancy_model.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

namespace vxpc::test {

inline VoxelBlock
randomBlock(int side, double density, std::mt19937_64& rng)
{
  std::bernoulli_distribution coin(density);
  VoxelBlock b(side);
  for (std::size_t i = 0; i < b.volume(); i++)
    b[i] = coin(rng) ? 1 : 0;
  return b;
}

// Occupancy concentrated on a few random sub-cubes, so that partitioning
// has something to gain.
inline VoxelBlock
clusteredBlock(int side, std::mt19937_64& rng)
{
  VoxelBlock b(side);
  std::uniform_int_distribution<int> pos(0, side - 1);
  std::uniform_int_distribution<int> clusters(1, 4);
  std::uniform_real_distribution<double> dens(0.05, 0.9);
  const int n = clusters(rng);
  for (int c = 0; c < n; c++) {
    const int extent = std::max(1, side / (2 << (rng() % 3)));
    const int ox = pos(rng), oy = pos(rng), oz = pos(rng);
    std::bernoulli_distribution coin(dens(rng));
    for (int x = ox; x < std::min(side, ox + extent); x++)
      for (int y = oy; y < std::min(side, oy + extent); y++)
        for (int z = oz; z < std::min(side, oz + extent); z++)
          if (coin(rng))
            b.set(x, y, z);
  }
  if (b.empty())
    b.set(pos(rng), pos(rng), pos(rng));
  return b;
}

// Reference forward pass: zero-padded dense arrays and plain nested loops.
// Accumulates each output as bias, then live taps in kernel raster order
// with input channels innermost, then the residual input, then relu.
// `reluPattern`, when given, receives the on/off state of every relu unit.
template<typename Real>
std::vector<std::vector<Real>>
naiveForward(
  const Network<Real>& net, const VoxelBlock& block,
  std::vector<uint8_t>* reluPattern = nullptr)
{
  if (reluPattern)
    reluPattern->clear();
  const int d = block.side();
  const std::size_t vol = block.volume();
  std::vector<Real> act(vol);
  for (std::size_t i = 0; i < vol; i++)
    act[i] = block[i] ? Real(1) : Real(0);
  int channels = 1;

  std::vector<std::vector<Real>> outputs;
  std::vector<Real> residual;
  for (const auto& L : net.layers()) {
    if (L.role == LayerRole::ResidualOpen)
      residual = act;
    const int k = L.kernel;
    const int r = k / 2;
    const auto mask = makeMask(k, L.mask);
    std::vector<Real> out(vol * L.outChannels);
    for (int x = 0; x < d; x++)
      for (int y = 0; y < d; y++)
        for (int z = 0; z < d; z++) {
          const std::size_t pos = (std::size_t(x) * d + y) * d + z;
          for (int o = 0; o < L.outChannels; o++) {
            Real acc = L.biases[o];
            int t = 0;
            for (int a = -r; a <= r; a++)
              for (int b = -r; b <= r; b++)
                for (int c = -r; c <= r; c++, t++) {
                  if (!mask[t])
                    continue;
                  const int xx = x + a, yy = y + b, zz = z + c;
                  if (xx < 0 || yy < 0 || zz < 0 || xx >= d || yy >= d || zz >= d)
                    continue;
                  const std::size_t q = (std::size_t(xx) * d + yy) * d + zz;
                  for (int ci = 0; ci < L.inChannels; ci++)
                    acc = acc
                      + L.weights[L.weightIndex(o, ci, t)]
                        * act[q * channels + ci];
                }
            if (L.role == LayerRole::ResidualClose)
              acc = acc + residual[pos * L.outChannels + o];
            if (L.activation == Activation::Relu) {
              if (reluPattern)
                reluPattern->push_back(acc > Real(0));
              if (!(acc > Real(0)))
                acc = Real(0);
            }
            out[pos * L.outChannels + o] = acc;
          }
        }
    act = out;
    channels = L.outChannels;
    outputs.push_back(out);
  }
  return outputs;
}

// Sets every bias to a random nonzero value so that no relu sits exactly at
// its kink on empty context.
inline void
randomizeBiases(Network<double>& net, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(0.05, 0.3);
  for (auto& l : net.mutableLayers())
    for (auto& b : l.biases)
      b = (rng() & 1) ? u(rng) : -u(rng);
}

inline double
blockLoss(const Network<double>& net, const VoxelBlock& block)
{
  BlockEvaluator<double> ev(net, block.side());
  ev.setInput(block);
  ev.evaluateAll();
  return ev.lossBits();
}

struct GradientCheck {
  std::size_t parameters = 0;
  std::size_t reducedStep = 0;  // checks that needed a step below eps
  double maxRelativeError = 0;
};

// Central differences over every parameter against the analytic gradient.
// A difference whose two probes switch some relu on or off straddles a kink
// and says nothing about the derivative; the step is then cut by 10 until
// the relu pattern matches the unperturbed one (down to eps / 1000).
inline GradientCheck
checkGradients(const Network<double>& net, const VoxelBlock& block, double eps)
{
  auto analytic = net.zerosLike();
  {
    BlockEvaluator<double> ev(net, block.side());
    ev.setInput(block);
    ev.evaluateAll();
    ev.accumulateGradients(analytic);
  }
  std::vector<uint8_t> basePattern, pattern;
  naiveForward(net, block, &basePattern);

  GradientCheck out;
  auto probe = net;
  auto visit = [&](double& param, double grad) {
    const double saved = param;
    double numeric = 0;
    double h = eps;
    for (int attempt = 0; attempt < 4; attempt++, h /= 10) {
      param = saved + h;
      const double up = blockLoss(probe, block);
      naiveForward(probe, block, &pattern);
      bool smooth = pattern == basePattern;
      param = saved - h;
      const double down = blockLoss(probe, block);
      naiveForward(probe, block, &pattern);
      smooth = smooth && pattern == basePattern;
      param = saved;
      numeric = (up - down) / (2 * h);
      if (smooth)
        break;
    }
    if (h < eps)
      out.reducedStep++;
    const double scale = std::max(std::abs(numeric), std::abs(grad));
    const double rel = scale == 0 ? 0 : std::abs(numeric - grad) / scale;
    out.maxRelativeError = std::max(out.maxRelativeError, rel);
    out.parameters++;
  };
  auto& layers = probe.mutableLayers();
  for (std::size_t li = 0; li < layers.size(); li++) {
    for (std::size_t k = 0; k < layers[li].weights.size(); k++)
      visit(layers[li].weights[k], analytic.layers()[li].weights[k]);
    for (std::size_t k = 0; k < layers[li].biases.size(); k++)
      visit(layers[li].biases[k], analytic.layers()[li].biases[k]);
  }
  return out;
}

// -log2 of the probability assigned to the actual bit.
inline double
idealBits(bool bit, uint32_t p1)
{
  const double p = double(p1) / double(kProbabilityOne);
  return -std::log2(bit ? p : 1 - p);
}

}  // namespace vxpc::test
