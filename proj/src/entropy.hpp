#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vxpc {

// Probabilities handed to the coder are P(bit == 1) in units of 2^-16,
// restricted to [1, 65535].
constexpr uint32_t kProbabilityBits = 16;
constexpr uint32_t kProbabilityOne = 1u << kProbabilityBits;
constexpr uint32_t kMinProbability = 1;
constexpr uint32_t kMaxProbability = kProbabilityOne - 1;

// Rounds and clamps a real probability of a one onto the coder scale.
uint32_t quantizeProbability(double p1);

//============================================================================
// Binary range coder: 32-bit range, 33-bit low with carry propagation into
// already emitted bytes through a cached byte and a run of pending 0xFF.

class BinaryEncoder {
public:
  BinaryEncoder();

  void encodeBit(bool bit, uint32_t p1);

  // Bits committed so far, counting the information held in the range
  // register but not the flush. Monotone non-decreasing.
  uint64_t bitsEmitted() const;

  // Terminates the codeword and returns it. The encoder is reset afterwards.
  std::vector<uint8_t> flush();

  std::size_t symbolCount() const { return symbols_; }

private:
  void shiftLow();

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cacheSize_ = 1;
  uint64_t shifts_ = 0;
  std::size_t symbols_ = 0;
  std::vector<uint8_t> out_;
};

class BinaryDecoder {
public:
  explicit BinaryDecoder(std::span<const uint8_t> codeword);

  bool decodeBit(uint32_t p1);

  std::size_t bytesConsumed() const { return pos_; }

private:
  uint8_t nextByte();

  std::span<const uint8_t> in_;
  std::size_t pos_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

}  // namespace vxpc
