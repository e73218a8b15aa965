#include "entropy.hpp"

#include "errors.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vxpc {

namespace {

  constexpr uint32_t kTopValue = 1u << 24;

  void checkProbability(uint32_t p1)
  {
    if (p1 < kMinProbability || p1 > kMaxProbability)
      throw ArgumentError(
        "coder probability " + std::to_string(p1) + " outside [1, 65535]");
  }

}  // namespace

uint32_t
quantizeProbability(double p1)
{
  if (!(p1 > 0.0))
    return kMinProbability;
  const double scaled = std::nearbyint(p1 * double(kProbabilityOne));
  if (scaled >= double(kMaxProbability))
    return kMaxProbability;
  if (scaled <= double(kMinProbability))
    return kMinProbability;
  return static_cast<uint32_t>(scaled);
}

//============================================================================

BinaryEncoder::BinaryEncoder() = default;

void
BinaryEncoder::encodeBit(bool bit, uint32_t p1)
{
  checkProbability(p1);
  // Ones take the lower part of the interval.
  const uint32_t bound = (range_ >> kProbabilityBits) * p1;
  if (bit) {
    range_ = bound;
  } else {
    low_ += bound;
    range_ -= bound;
  }
  while (range_ < kTopValue) {
    range_ <<= 8;
    shiftLow();
    shifts_++;
  }
  symbols_++;
}

void
BinaryEncoder::shiftLow()
{
  if (static_cast<uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<uint8_t>(low_ >> 32);
    uint8_t temp = cache_;
    do {
      out_.push_back(static_cast<uint8_t>(temp + carry));
      temp = 0xFF;
    } while (--cacheSize_ != 0);
    cache_ = static_cast<uint8_t>(low_ >> 24);
  }
  cacheSize_++;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

uint64_t
BinaryEncoder::bitsEmitted() const
{
  const int rangeLog2 = std::bit_width(range_) - 1;
  return 8 * shifts_ + static_cast<uint64_t>(31 - rangeLog2);
}

std::vector<uint8_t>
BinaryEncoder::flush()
{
  for (int i = 0; i < 5; i++)
    shiftLow();

  // The first byte is the initial cache and never receives a carry, since
  // low + range never exceeds 2^32 before the first shift.
  if (out_.empty() || out_.front() != 0)
    throw std::logic_error("range coder produced a nonzero leading byte");
  std::vector<uint8_t> codeword(out_.begin() + 1, out_.end());
  *this = BinaryEncoder();
  return codeword;
}

//============================================================================

BinaryDecoder::BinaryDecoder(std::span<const uint8_t> codeword) : in_(codeword)
{
  for (int i = 0; i < 4; i++)
    code_ = (code_ << 8) | nextByte();
}

uint8_t
BinaryDecoder::nextByte()
{
  if (pos_ >= in_.size())
    throw FormatError("arithmetic codeword exhausted", pos_);
  return in_[pos_++];
}

bool
BinaryDecoder::decodeBit(uint32_t p1)
{
  checkProbability(p1);
  const uint32_t bound = (range_ >> kProbabilityBits) * p1;
  bool bit;
  if (code_ < bound) {
    range_ = bound;
    bit = true;
  } else {
    code_ -= bound;
    range_ -= bound;
    bit = false;
  }
  while (range_ < kTopValue) {
    range_ <<= 8;
    code_ = (code_ << 8) | nextByte();
  }
  return bit;
}

}  // namespace vxpc
