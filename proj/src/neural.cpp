#include "neural.hpp"

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace vxpc {

std::vector<uint8_t>
makeMask(int kernel, MaskType type)
{
  if (kernel < 1 || kernel % 2 == 0)
    throw ArgumentError(
      "mask kernel must be odd and positive, got " + std::to_string(kernel));
  const int taps = kernel * kernel * kernel;
  const int center = taps / 2;
  std::vector<uint8_t> mask(taps, 1);
  if (type == MaskType::None)
    return mask;
  const int firstZero = type == MaskType::A ? center : center + 1;
  std::fill(mask.begin() + firstZero, mask.end(), uint8_t(0));
  return mask;
}

ArchitectureConfig
referenceArchitecture()
{
  return {7, 64, 2, 32, 5, 64};
}

ArchitectureConfig
tinyArchitecture()
{
  return {3, 8, 1, 4, 3, 8};
}

//============================================================================

template<typename Real>
Network<Real>::Network(std::vector<ConvLayer<Real>> layers)
  : layers_(std::move(layers))
{
  if (layers_.empty())
    throw ArgumentError("network has no layers");

  int channels = 1;
  int openAt = -1;
  for (std::size_t i = 0; i < layers_.size(); i++) {
    const auto& l = layers_[i];
    const std::string where = "layer " + std::to_string(i) + ": ";
    if (l.kernel < 1 || l.kernel % 2 == 0)
      throw ArgumentError(where + "kernel must be odd");
    if (l.inChannels < 1 || l.outChannels < 1)
      throw ArgumentError(where + "channel counts must be positive");
    if (l.inChannels != channels)
      throw ArgumentError(
        where + "expects " + std::to_string(l.inChannels)
        + " input channels, previous layer produces "
        + std::to_string(channels));
    if (i == 0 && l.mask != MaskType::A)
      throw ArgumentError(where + "the first layer must use mask A");
    if (i > 0 && l.kernel > 1 && l.mask == MaskType::None)
      throw ArgumentError(where + "spatial layers after the first need a mask");
    if (l.weights.size() != std::size_t(l.outChannels) * l.inChannels * l.taps())
      throw ArgumentError(where + "weight count does not match shape");
    if (l.biases.size() != std::size_t(l.outChannels))
      throw ArgumentError(where + "bias count does not match shape");
    if (
      static_cast<uint8_t>(l.role) > 2 || static_cast<uint8_t>(l.mask) > 2
      || static_cast<uint8_t>(l.activation) > 1)
      throw ArgumentError(where + "unknown layer tag");

    if (l.role == LayerRole::ResidualOpen) {
      if (openAt >= 0)
        throw ArgumentError(where + "nested residual blocks are not supported");
      openAt = static_cast<int>(i);
    } else if (l.role == LayerRole::ResidualClose) {
      if (openAt < 0)
        throw ArgumentError(where + "residual close without an open");
      if (l.outChannels != layers_[openAt].inChannels)
        throw ArgumentError(where + "residual close width mismatch");
      openAt = -1;
    }
    channels = l.outChannels;
  }
  if (openAt >= 0)
    throw ArgumentError("unterminated residual block");
  if (channels != 2)
    throw ArgumentError("the last layer must produce 2 logits");
  if (layers_.back().activation != Activation::None)
    throw ArgumentError("the last layer must not have an activation");
}

namespace {

  template<typename Real>
  ConvLayer<Real> makeLayer(
    LayerRole role, MaskType mask, int kernel, int in, int out,
    Activation act, std::mt19937_64& rng)
  {
    ConvLayer<Real> l;
    l.role = role;
    l.mask = mask;
    l.kernel = kernel;
    l.inChannels = in;
    l.outChannels = out;
    l.activation = act;
    l.weights.assign(std::size_t(out) * in * l.taps(), Real(0));
    l.biases.assign(out, Real(0));

    const double fanIn = double(in) * l.taps();
    const double fanOut = double(out) * l.taps();
    const double limit = std::sqrt(6.0 / (fanIn + fanOut));
    const auto live = makeMask(kernel, mask);
    for (int o = 0; o < out; o++)
      for (int c = 0; c < in; c++)
        for (int t = 0; t < l.taps(); t++) {
          // 53-bit uniform draw; drawn for every tap to keep the stream
          // independent of the mask.
          const double u = double(rng() >> 11) * 0x1.0p-53;
          if (live[t])
            l.weights[l.weightIndex(o, c, t)] =
              static_cast<Real>((2.0 * u - 1.0) * limit);
        }
    return l;
  }

}  // namespace

template<typename Real>
Network<Real>
Network<Real>::build(const ArchitectureConfig& cfg, uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::vector<ConvLayer<Real>> layers;
  const auto relu = Activation::Relu;

  layers.push_back(makeLayer<Real>(
    LayerRole::Plain, MaskType::A, cfg.firstKernel, 1, cfg.filters, relu, rng));
  for (int r = 0; r < cfg.residualBlocks; r++) {
    layers.push_back(makeLayer<Real>(
      LayerRole::ResidualOpen, MaskType::B, 1, cfg.filters, cfg.bottleneck,
      relu, rng));
    layers.push_back(makeLayer<Real>(
      LayerRole::Plain, MaskType::B, cfg.residualKernel, cfg.bottleneck,
      cfg.bottleneck, relu, rng));
    layers.push_back(makeLayer<Real>(
      LayerRole::ResidualClose, MaskType::B, 1, cfg.bottleneck, cfg.filters,
      relu, rng));
  }
  layers.push_back(makeLayer<Real>(
    LayerRole::Plain, MaskType::B, 1, cfg.filters, cfg.headChannels, relu,
    rng));
  layers.push_back(makeLayer<Real>(
    LayerRole::Plain, MaskType::B, 1, cfg.headChannels, 2, Activation::None,
    rng));
  return Network(std::move(layers));
}

template<typename Real>
std::size_t
Network<Real>::parameterCount() const
{
  std::size_t n = 0;
  for (const auto& l : layers_)
    n += l.parameterCount();
  return n;
}

template<typename Real>
Network<Real>
Network<Real>::zerosLike() const
{
  auto layers = layers_;
  for (auto& l : layers) {
    std::fill(l.weights.begin(), l.weights.end(), Real(0));
    std::fill(l.biases.begin(), l.biases.end(), Real(0));
  }
  return Network(std::move(layers));
}

//============================================================================

template<typename Real>
struct BlockEvaluator<Real>::Impl {
  struct Tap {
    int index;  // kernel raster index
    int dx, dy, dz;
  };

  struct Plan {
    std::vector<Tap> taps;
    std::vector<Real> packed;  // [tap][out][in]
    std::vector<Real> biases;
    int inChannels;
    int outChannels;
    bool relu;
    LayerRole role;
    int source;      // layer whose output feeds this one; -1 = input volume
    int skipSource;  // for ResidualClose, as above
  };

  std::vector<Plan> plans;
  std::vector<Real> input;
  std::vector<std::vector<Real>> outputs;

  const std::vector<Real>& bufferOf(int layer) const
  {
    return layer < 0 ? input : outputs[layer];
  }
};

template<typename Real>
BlockEvaluator<Real>::BlockEvaluator(const Network<Real>& network, int side)
  : side_(side)
  , volume_(std::size_t(side) * side * side)
  , impl_(std::make_unique<Impl>())
{
  if (side < 1)
    throw ArgumentError("block side must be positive");
  const auto& layers = network.layers();
  if (layers.empty())
    throw ArgumentError("evaluating an empty network");

  int openSource = -1;
  for (std::size_t li = 0; li < layers.size(); li++) {
    const auto& l = layers[li];
    typename Impl::Plan p;
    p.inChannels = l.inChannels;
    p.outChannels = l.outChannels;
    p.relu = l.activation == Activation::Relu;
    p.role = l.role;
    p.source = static_cast<int>(li) - 1;
    p.skipSource = -1;
    if (l.role == LayerRole::ResidualOpen)
      openSource = p.source;
    if (l.role == LayerRole::ResidualClose)
      p.skipSource = openSource;

    const auto live = makeMask(l.kernel, l.mask);
    const int r = l.kernel / 2;
    for (int t = 0; t < l.taps(); t++) {
      if (!live[t])
        continue;
      const int kx = t / (l.kernel * l.kernel);
      const int ky = (t / l.kernel) % l.kernel;
      const int kz = t % l.kernel;
      p.taps.push_back({t, kx - r, ky - r, kz - r});
    }
    p.packed.resize(p.taps.size() * l.outChannels * l.inChannels);
    for (std::size_t ti = 0; ti < p.taps.size(); ti++)
      for (int o = 0; o < l.outChannels; o++)
        for (int c = 0; c < l.inChannels; c++)
          p.packed[(ti * l.outChannels + o) * l.inChannels + c] =
            l.weights[l.weightIndex(o, c, p.taps[ti].index)];
    p.biases = l.biases;
    impl_->plans.push_back(std::move(p));
    impl_->outputs.emplace_back(volume_ * l.outChannels, Real(0));
  }
  impl_->input.assign(volume_, Real(0));
}

template<typename Real>
BlockEvaluator<Real>::~BlockEvaluator() = default;
template<typename Real>
BlockEvaluator<Real>::BlockEvaluator(BlockEvaluator&&) noexcept = default;
template<typename Real>
BlockEvaluator<Real>&
BlockEvaluator<Real>::operator=(BlockEvaluator&&) noexcept = default;

template<typename Real>
void
BlockEvaluator<Real>::setInput(const VoxelBlock& block)
{
  if (block.side() != side_)
    throw ArgumentError("block side does not match evaluator");
  for (std::size_t i = 0; i < volume_; i++) {
    const uint8_t v = block[i];
    if (v > 1)
      throw ArgumentError("block occupancy values must be 0 or 1");
    impl_->input[i] = Real(v);
  }
}

template<typename Real>
void
BlockEvaluator<Real>::clearInput()
{
  std::fill(impl_->input.begin(), impl_->input.end(), Real(0));
}

template<typename Real>
void
BlockEvaluator<Real>::setVoxel(std::size_t index, bool occupied)
{
  impl_->input.at(index) = occupied ? Real(1) : Real(0);
}

namespace {

  template<typename Real, typename Plan>
  void evaluateLayerAt(
    const Plan& p, const std::vector<Real>& in, const std::vector<Real>* skip,
    std::vector<Real>& out, int side, std::size_t pos, Real* acc)
  {
    const int x = static_cast<int>(pos / (std::size_t(side) * side));
    const int y = static_cast<int>((pos / side) % side);
    const int z = static_cast<int>(pos % side);
    const int nIn = p.inChannels;
    const int nOut = p.outChannels;

    for (int o = 0; o < nOut; o++)
      acc[o] = p.biases[o];

    for (std::size_t ti = 0; ti < p.taps.size(); ti++) {
      const auto& t = p.taps[ti];
      const int nx = x + t.dx, ny = y + t.dy, nz = z + t.dz;
      if (nx < 0 || ny < 0 || nz < 0 || nx >= side || ny >= side || nz >= side)
        continue;
      const std::size_t npos = (std::size_t(nx) * side + ny) * side + nz;
      const Real* xin = in.data() + npos * nIn;
      const Real* w = p.packed.data() + ti * nOut * nIn;
      for (int o = 0; o < nOut; o++, w += nIn) {
        Real s = acc[o];
        for (int c = 0; c < nIn; c++)
          s += w[c] * xin[c];
        acc[o] = s;
      }
    }

    Real* dst = out.data() + pos * nOut;
    const Real* sk = skip ? skip->data() + pos * nOut : nullptr;
    for (int o = 0; o < nOut; o++) {
      Real v = acc[o];
      if (sk)
        v += sk[o];
      if (p.relu && !(v > Real(0)))
        v = Real(0);
      dst[o] = v;
    }
  }

}  // namespace

template<typename Real>
void
BlockEvaluator<Real>::evaluateAll()
{
  auto& im = *impl_;
  for (std::size_t li = 0; li < im.plans.size(); li++) {
    const auto& p = im.plans[li];
    const auto& in = im.bufferOf(p.source);
    const auto* skip =
      p.role == LayerRole::ResidualClose ? &im.bufferOf(p.skipSource) : nullptr;
    std::vector<Real> acc(p.outChannels);
    for (std::size_t pos = 0; pos < volume_; pos++)
      evaluateLayerAt(p, in, skip, im.outputs[li], side_, pos, acc.data());
  }
}

template<typename Real>
void
BlockEvaluator<Real>::evaluateAt(std::size_t index)
{
  if (index >= volume_)
    throw ArgumentError("evaluation position outside block");
  auto& im = *impl_;
  Real acc[256];
  std::vector<Real> wide;
  for (std::size_t li = 0; li < im.plans.size(); li++) {
    const auto& p = im.plans[li];
    Real* a = acc;
    if (p.outChannels > 256) {
      wide.resize(p.outChannels);
      a = wide.data();
    }
    const auto* skip =
      p.role == LayerRole::ResidualClose ? &im.bufferOf(p.skipSource) : nullptr;
    evaluateLayerAt(
      p, im.bufferOf(p.source), skip, im.outputs[li], side_, index, a);
  }
}

template<typename Real>
std::span<const Real>
BlockEvaluator<Real>::logits() const
{
  return impl_->outputs.back();
}

namespace {

  template<typename Real>
  ProbabilityPair<Real> softmax2(Real l0, Real l1)
  {
    const Real m = std::max(l0, l1);
    const Real e0 = std::exp(l0 - m);
    const Real e1 = std::exp(l1 - m);
    const Real s = e0 + e1;
    return {e0 / s, e1 / s};
  }

}  // namespace

template<typename Real>
ProbabilityPair<Real>
BlockEvaluator<Real>::probabilityAt(std::size_t index) const
{
  const auto& lg = impl_->outputs.back();
  return softmax2(lg[2 * index], lg[2 * index + 1]);
}

template<typename Real>
std::vector<ProbabilityPair<Real>>
BlockEvaluator<Real>::probabilities() const
{
  std::vector<ProbabilityPair<Real>> out(volume_);
  for (std::size_t i = 0; i < volume_; i++)
    out[i] = probabilityAt(i);
  return out;
}

template<typename Real>
double
BlockEvaluator<Real>::lossBits() const
{
  const auto& lg = impl_->outputs.back();
  const auto& in = impl_->input;
  double total = 0;
  for (std::size_t i = 0; i < volume_; i++) {
    const double l0 = lg[2 * i], l1 = lg[2 * i + 1];
    const double m = std::max(l0, l1);
    const double lse = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
    total += (lse - (in[i] > Real(0) ? l1 : l0));
  }
  return total / std::numbers::ln2;
}

template<typename Real>
void
BlockEvaluator<Real>::accumulateGradients(Network<Real>& gradients) const
{
  const auto& im = *impl_;
  auto& glayers = gradients.mutableLayers();
  if (glayers.size() != im.plans.size())
    throw ArgumentError("gradient network topology mismatch");

  // d loss / d logits = (softmax - onehot) / ln 2.
  std::vector<Real> gradOut(volume_ * 2);
  for (std::size_t i = 0; i < volume_; i++) {
    const auto p = probabilityAt(i);
    const bool one = im.input[i] > Real(0);
    gradOut[2 * i] = (p.p0 - (one ? Real(0) : Real(1))) / Real(std::numbers::ln2);
    gradOut[2 * i + 1] =
      (p.p1 - (one ? Real(1) : Real(0))) / Real(std::numbers::ln2);
  }

  std::vector<Real> pendingSkip;
  for (int li = static_cast<int>(im.plans.size()) - 1; li >= 0; li--) {
    const auto& p = im.plans[li];
    const auto& out = im.outputs[li];
    const auto& in = im.bufferOf(p.source);
    auto& gl = glayers[li];
    const int nIn = p.inChannels;
    const int nOut = p.outChannels;

    // Through the activation; relu'(pre) is nonzero iff the output is.
    std::vector<Real> gpre = std::move(gradOut);
    if (p.relu)
      for (std::size_t k = 0; k < gpre.size(); k++)
        if (!(out[k] > Real(0)))
          gpre[k] = Real(0);
    if (p.role == LayerRole::ResidualClose)
      pendingSkip = gpre;

    const bool needInputGrad = li > 0;
    std::vector<Real> gin(needInputGrad ? volume_ * nIn : 0, Real(0));
    std::vector<Real> gpacked(p.packed.size(), Real(0));

    for (std::size_t pos = 0; pos < volume_; pos++) {
      const Real* g = gpre.data() + pos * nOut;
      for (int o = 0; o < nOut; o++)
        gl.biases[o] += g[o];

      const int x = static_cast<int>(pos / (std::size_t(side_) * side_));
      const int y = static_cast<int>((pos / side_) % side_);
      const int z = static_cast<int>(pos % side_);
      for (std::size_t ti = 0; ti < p.taps.size(); ti++) {
        const auto& t = p.taps[ti];
        const int nx = x + t.dx, ny = y + t.dy, nz = z + t.dz;
        if (
          nx < 0 || ny < 0 || nz < 0 || nx >= side_ || ny >= side_
          || nz >= side_)
          continue;
        const std::size_t npos = (std::size_t(nx) * side_ + ny) * side_ + nz;
        const Real* xin = in.data() + npos * nIn;
        Real* gx = needInputGrad ? gin.data() + npos * nIn : nullptr;
        for (int o = 0; o < nOut; o++) {
          const Real go = g[o];
          if (go == Real(0))
            continue;
          const std::size_t base = (ti * nOut + o) * nIn;
          Real* gw = gpacked.data() + base;
          const Real* w = p.packed.data() + base;
          for (int c = 0; c < nIn; c++) {
            gw[c] += go * xin[c];
            if (gx)
              gx[c] += go * w[c];
          }
        }
      }
    }

    for (std::size_t ti = 0; ti < p.taps.size(); ti++)
      for (int o = 0; o < nOut; o++)
        for (int c = 0; c < nIn; c++)
          gl.weights[gl.weightIndex(o, c, p.taps[ti].index)] +=
            gpacked[(ti * nOut + o) * nIn + c];

    if (p.role == LayerRole::ResidualOpen && needInputGrad) {
      for (std::size_t k = 0; k < gin.size(); k++)
        gin[k] += pendingSkip[k];
      pendingSkip.clear();
    }
    gradOut = std::move(gin);
  }
}

//============================================================================

template<typename Real>
std::vector<ProbabilityPair<Real>>
forwardProbabilities(const Network<Real>& network, const VoxelBlock& block)
{
  BlockEvaluator<Real> ev(network, block.side());
  ev.setInput(block);
  ev.evaluateAll();
  return ev.probabilities();
}

double
clampProbability(double p)
{
  constexpr double lo = 0x1.0p-16;
  constexpr double hi = 1.0 - 0x1.0p-16;
  return std::clamp(p, lo, hi);
}

template<typename Real>
double
crossEntropyBits(
  std::span<const ProbabilityPair<Real>> field, const VoxelBlock& block)
{
  if (field.size() != block.volume())
    throw ArgumentError("probability field and block sizes differ");
  double bits = 0;
  for (std::size_t i = 0; i < field.size(); i++) {
    const uint8_t v = block[i];
    if (v > 1)
      throw ArgumentError("block occupancy values must be 0 or 1");
    const double p = clampProbability(double(v ? field[i].p1 : field[i].p0));
    bits -= std::log2(p);
  }
  return bits;
}

template class Network<float>;
template class Network<double>;
template class BlockEvaluator<float>;
template class BlockEvaluator<double>;

template std::vector<ProbabilityPair<float>>
forwardProbabilities(const Network<float>&, const VoxelBlock&);
template std::vector<ProbabilityPair<double>>
forwardProbabilities(const Network<double>&, const VoxelBlock&);
template double
crossEntropyBits(std::span<const ProbabilityPair<float>>, const VoxelBlock&);
template double
crossEntropyBits(std::span<const ProbabilityPair<double>>, const VoxelBlock&);

}  // namespace vxpc
