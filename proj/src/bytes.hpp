#pragma once

#include "errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vxpc {

// Little-endian serialization helpers.

class ByteWriter {
public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u32(uint32_t v) { put(v); }
  void u64(uint64_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<uint32_t>(v)); }
  void bytes(std::span<const uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void bytes(std::initializer_list<uint8_t> b) { buf_.insert(buf_.end(), b); }

  std::span<const uint8_t> data() const { return buf_; }
  std::size_t size() const { return buf_.size(); }
  std::vector<uint8_t> take() { return std::move(buf_); }

private:
  template<typename T>
  void put(T v)
  {
    for (std::size_t i = 0; i < sizeof(T); i++)
      buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  std::vector<uint8_t> buf_;
};

class ByteReader {
public:
  explicit ByteReader(std::span<const uint8_t> in) : in_(in) {}

  uint8_t u8() { return get<uint8_t>(); }
  uint32_t u32() { return get<uint32_t>(); }
  uint64_t u64() { return get<uint64_t>(); }
  float f32() { return std::bit_cast<float>(get<uint32_t>()); }

  std::span<const uint8_t> bytes(std::size_t n)
  {
    need(n);
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  bool expectMagic(std::string_view magic)
  {
    if (remaining() < magic.size())
      return false;
    const bool ok =
      std::memcmp(in_.data() + pos_, magic.data(), magic.size()) == 0;
    pos_ += magic.size();
    return ok;
  }

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

private:
  void need(std::size_t n) const
  {
    if (remaining() < n)
      throw FormatError("unexpected end of data", pos_);
  }

  template<typename T>
  T get()
  {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); i++)
      v |= static_cast<T>(T(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const uint8_t> in_;
  std::size_t pos_ = 0;
};

std::vector<uint8_t> readFileBytes(const std::string& path);
void writeFileBytes(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace vxpc
