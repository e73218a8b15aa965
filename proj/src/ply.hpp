#pragma once

#include "geometry.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace vxpc {

enum class PlyFormat
{
  Ascii,
  BinaryLittleEndian,
};

// Reads the x/y/z properties of the "vertex" element. Other elements and
// properties are skipped. Errors carry the byte offset of the failure.
PointCloud readPly(std::string_view bytes);
PointCloud readPly(std::istream& in);
PointCloud loadPly(const std::string& path);

// Writes x/y/z as 32-bit float properties.
std::string writePly(const PointCloud& cloud, PlyFormat format);
void writePly(std::ostream& out, const PointCloud& cloud, PlyFormat format);
void savePly(const std::string& path, const PointCloud& cloud, PlyFormat format);

}  // namespace vxpc
