#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vxpc {

// Error categories surface unchanged as C API status codes and CLI exit codes.
enum class ErrorKind
{
  Argument = 1,
  Io = 2,
  Format = 3,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind)
  {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
public:
  explicit ArgumentError(const std::string& what)
    : Error(ErrorKind::Argument, what)
  {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// Malformed input data. Carries the byte offset where parsing failed when
// one is meaningful.
class FormatError : public Error {
public:
  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

  explicit FormatError(const std::string& what, std::size_t offset = kNoOffset)
    : Error(
        ErrorKind::Format,
        offset == kNoOffset
          ? what
          : what + " (at byte offset " + std::to_string(offset) + ")")
    , detail_(what)
    , offset_(offset)
  {}

  std::size_t offset() const { return offset_; }
  // Message without the offset suffix.
  const std::string& detail() const { return detail_; }

private:
  std::string detail_;
  std::size_t offset_;
};

}  // namespace vxpc
