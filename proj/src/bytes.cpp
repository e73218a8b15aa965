#include "bytes.hpp"

#include <fstream>
#include <iterator>

namespace vxpc {

std::vector<uint8_t>
readFileBytes(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "' for reading");
  std::vector<uint8_t> out(
    (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad())
    throw IoError("failed reading '" + path + "'");
  return out;
}

void
writeFileBytes(const std::string& path, std::span<const uint8_t> bytes)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out)
    throw IoError("failed writing '" + path + "'");
}

}  // namespace vxpc
