#include "weights.hpp"

#include "bytes.hpp"
#include "errors.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

namespace vxpc {

uint64_t
fnv1a64(std::span<const uint8_t> bytes)
{
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<uint8_t>
serializeWeights(const Network<float>& network)
{
  ByteWriter w;
  w.bytes({'V', 'X', 'D', 'N'});
  w.u8(kWeightFileVersion);
  w.u32(static_cast<uint32_t>(network.layers().size()));
  for (const auto& l : network.layers()) {
    w.u8(static_cast<uint8_t>(l.role));
    w.u8(static_cast<uint8_t>(l.mask));
    w.u8(static_cast<uint8_t>(l.kernel));
    w.u32(static_cast<uint32_t>(l.inChannels));
    w.u32(static_cast<uint32_t>(l.outChannels));
    w.u8(static_cast<uint8_t>(l.activation));
    for (float v : l.weights)
      w.f32(v);
    for (float v : l.biases)
      w.f32(v);
  }
  w.u64(fnv1a64(w.data()));
  return w.take();
}

LoadedWeights
parseWeights(std::span<const uint8_t> bytes)
{
  if (bytes.size() < 8 + 9)
    throw FormatError("weight file too short", 0);
  const auto body = bytes.first(bytes.size() - 8);
  ByteReader trailer(bytes.subspan(bytes.size() - 8));
  const uint64_t stored = trailer.u64();
  const uint64_t actual = fnv1a64(body);
  if (stored != actual)
    throw FormatError("weight file checksum mismatch", bytes.size() - 8);

  ByteReader r(body);
  if (!r.expectMagic("VXDN"))
    throw FormatError("bad weight file magic", 0);
  const uint8_t version = r.u8();
  if (version != kWeightFileVersion)
    throw FormatError(
      "unsupported weight file version " + std::to_string(version), 4);
  const uint32_t count = r.u32();
  if (count == 0 || count > 4096)
    throw FormatError("implausible layer count", 5);

  std::vector<ConvLayer<float>> layers;
  for (uint32_t i = 0; i < count; i++) {
    const std::size_t at = r.offset();
    ConvLayer<float> l;
    const uint8_t role = r.u8();
    const uint8_t mask = r.u8();
    const uint8_t kernel = r.u8();
    const uint32_t in = r.u32();
    const uint32_t out = r.u32();
    const uint8_t act = r.u8();
    if (role > 2 || mask > 2 || act > 1)
      throw FormatError("unknown layer tag", at);
    if (kernel == 0 || kernel % 2 == 0 || in == 0 || out == 0
        || in > 65536 || out > 65536)
      throw FormatError("bad layer shape", at);
    l.role = static_cast<LayerRole>(role);
    l.mask = static_cast<MaskType>(mask);
    l.kernel = kernel;
    l.inChannels = static_cast<int>(in);
    l.outChannels = static_cast<int>(out);
    l.activation = static_cast<Activation>(act);
    const std::size_t nWeights = std::size_t(out) * in * l.taps();
    if (r.remaining() / 4 < nWeights + out)
      throw FormatError("truncated weight data", r.offset());
    l.weights.resize(nWeights);
    for (auto& v : l.weights)
      v = r.f32();
    l.biases.resize(out);
    for (auto& v : l.biases)
      v = r.f32();
    layers.push_back(std::move(l));
  }
  if (r.remaining() != 0)
    throw FormatError("trailing bytes after last layer", r.offset());

  try {
    return {Network<float>(std::move(layers)), stored};
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("invalid network in weight file: ") + e.what());
  }
}

LoadedWeights
loadWeights(const std::string& path)
{
  return parseWeights(readFileBytes(path));
}

void
saveWeights(const std::string& path, const Network<float>& network)
{
  writeFileBytes(path, serializeWeights(network));
}

uint64_t
weightsChecksum(const Network<float>& network)
{
  const auto bytes = serializeWeights(network);
  ByteReader r(std::span<const uint8_t>(bytes).last(8));
  return r.u64();
}

}  // namespace vxpc
