#include "ply.hpp"

#include "errors.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <vector>

namespace vxpc {

static_assert(
  std::endian::native == std::endian::little,
  "binary PLY I/O assumes a little-endian host");

namespace {

  enum class ScalarType
  {
    Int8,
    UInt8,
    Int16,
    UInt16,
    Int32,
    UInt32,
    Float32,
    Float64,
  };

  std::optional<ScalarType> parseScalarType(std::string_view name)
  {
    if (name == "char" || name == "int8")
      return ScalarType::Int8;
    if (name == "uchar" || name == "uint8")
      return ScalarType::UInt8;
    if (name == "short" || name == "int16")
      return ScalarType::Int16;
    if (name == "ushort" || name == "uint16")
      return ScalarType::UInt16;
    if (name == "int" || name == "int32")
      return ScalarType::Int32;
    if (name == "uint" || name == "uint32")
      return ScalarType::UInt32;
    if (name == "float" || name == "float32")
      return ScalarType::Float32;
    if (name == "double" || name == "float64")
      return ScalarType::Float64;
    return std::nullopt;
  }

  std::size_t scalarSize(ScalarType t)
  {
    switch (t) {
    case ScalarType::Int8:
    case ScalarType::UInt8: return 1;
    case ScalarType::Int16:
    case ScalarType::UInt16: return 2;
    case ScalarType::Int32:
    case ScalarType::UInt32:
    case ScalarType::Float32: return 4;
    case ScalarType::Float64: return 8;
    }
    return 0;
  }

  template<typename T>
  T loadLE(const char* p)
  {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
  }

  double loadScalar(ScalarType t, const char* p)
  {
    switch (t) {
    case ScalarType::Int8: return loadLE<int8_t>(p);
    case ScalarType::UInt8: return loadLE<uint8_t>(p);
    case ScalarType::Int16: return loadLE<int16_t>(p);
    case ScalarType::UInt16: return loadLE<uint16_t>(p);
    case ScalarType::Int32: return loadLE<int32_t>(p);
    case ScalarType::UInt32: return loadLE<uint32_t>(p);
    case ScalarType::Float32: return loadLE<float>(p);
    case ScalarType::Float64: return loadLE<double>(p);
    }
    return 0;
  }

  struct Property {
    std::string name;
    ScalarType type = ScalarType::Float32;
    bool isList = false;
    ScalarType countType = ScalarType::UInt8;
  };

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
  };

  struct Header {
    PlyFormat format = PlyFormat::Ascii;
    std::vector<Element> elements;
    std::size_t bodyOffset = 0;
  };

  std::vector<std::string_view> splitWords(std::string_view line)
  {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
        i++;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t')
        i++;
      if (i > start)
        words.push_back(line.substr(start, i - start));
    }
    return words;
  }

  Header parseHeader(std::string_view bytes)
  {
    Header h;
    std::size_t pos = 0;
    bool sawFormat = false;
    bool first = true;

    while (true) {
      const std::size_t lineStart = pos;
      const std::size_t eol = bytes.find('\n', pos);
      if (eol == std::string_view::npos)
        throw FormatError("PLY header is not terminated by end_header", pos);
      std::string_view line = bytes.substr(pos, eol - pos);
      if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
      pos = eol + 1;

      const auto words = splitWords(line);
      if (first) {
        if (words.size() != 1 || words[0] != "ply")
          throw FormatError("missing 'ply' magic line", lineStart);
        first = false;
        continue;
      }
      if (words.empty() || words[0] == "comment" || words[0] == "obj_info")
        continue;

      if (words[0] == "format") {
        if (words.size() != 3)
          throw FormatError("malformed format line", lineStart);
        if (words[1] == "ascii")
          h.format = PlyFormat::Ascii;
        else if (words[1] == "binary_little_endian")
          h.format = PlyFormat::BinaryLittleEndian;
        else
          throw FormatError(
            "unsupported PLY format '" + std::string(words[1]) + "'",
            lineStart);
        sawFormat = true;
      } else if (words[0] == "element") {
        if (words.size() != 3)
          throw FormatError("malformed element line", lineStart);
        Element e;
        e.name = words[1];
        const auto* b = words[2].data();
        const auto [ptr, ec] = std::from_chars(b, b + words[2].size(), e.count);
        if (ec != std::errc() || ptr != b + words[2].size())
          throw FormatError("bad element count", lineStart);
        h.elements.push_back(std::move(e));
      } else if (words[0] == "property") {
        if (h.elements.empty())
          throw FormatError("property declared before any element", lineStart);
        Property p;
        if (words.size() == 5 && words[1] == "list") {
          const auto ct = parseScalarType(words[2]);
          const auto vt = parseScalarType(words[3]);
          if (!ct || !vt)
            throw FormatError("unknown list property type", lineStart);
          p.isList = true;
          p.countType = *ct;
          p.type = *vt;
          p.name = words[4];
        } else if (words.size() == 3) {
          const auto t = parseScalarType(words[1]);
          if (!t)
            throw FormatError(
              "unknown property type '" + std::string(words[1]) + "'",
              lineStart);
          p.type = *t;
          p.name = words[2];
        } else {
          throw FormatError("malformed property line", lineStart);
        }
        h.elements.back().properties.push_back(std::move(p));
      } else if (words[0] == "end_header") {
        if (!sawFormat)
          throw FormatError("PLY header lacks a format line", lineStart);
        h.bodyOffset = pos;
        return h;
      } else {
        throw FormatError(
          "unexpected header keyword '" + std::string(words[0]) + "'",
          lineStart);
      }
    }
  }

  struct XyzSlots {
    int x = -1;
    int y = -1;
    int z = -1;
  };

  XyzSlots findXyz(const Element& e, std::size_t headerOffset)
  {
    XyzSlots s;
    for (int i = 0; i < static_cast<int>(e.properties.size()); i++) {
      const auto& p = e.properties[i];
      if (p.isList)
        continue;
      if (p.name == "x")
        s.x = i;
      else if (p.name == "y")
        s.y = i;
      else if (p.name == "z")
        s.z = i;
    }
    if (s.x < 0 || s.y < 0 || s.z < 0)
      throw FormatError(
        "vertex element lacks x/y/z scalar properties", headerOffset);
    return s;
  }

  // ASCII body cursor over whitespace-separated tokens.
  class TokenReader {
  public:
    TokenReader(std::string_view bytes, std::size_t pos)
      : bytes_(bytes), pos_(pos)
    {}

    double next(const char* what, bool asFloat = false)
    {
      while (pos_ < bytes_.size() && std::isspace(uint8_t(bytes_[pos_])))
        pos_++;
      if (pos_ >= bytes_.size())
        throw FormatError(
          std::string("truncated ASCII PLY body while reading ") + what,
          pos_);
      const char* b = bytes_.data() + pos_;
      const char* e = bytes_.data() + bytes_.size();
      double v = 0;
      float f = 0;
      const auto [ptr, ec] =
        asFloat ? std::from_chars(b, e, f) : std::from_chars(b, e, v);
      if (ec != std::errc() || (ptr != e && !std::isspace(uint8_t(*ptr))))
        throw FormatError(std::string("malformed number in ") + what, pos_);
      pos_ += static_cast<std::size_t>(ptr - b);
      return asFloat ? double(f) : v;
    }

  private:
    std::string_view bytes_;
    std::size_t pos_;
  };

  PointCloud readAscii(std::string_view bytes, const Header& h)
  {
    PointCloud pc;
    TokenReader tokens(bytes, h.bodyOffset);
    for (const auto& e : h.elements) {
      const bool isVertex = e.name == "vertex";
      XyzSlots slots;
      if (isVertex) {
        slots = findXyz(e, 0);
        pc.points.reserve(e.count);
      }
      for (std::size_t r = 0; r < e.count; r++) {
        Point3 p;
        for (int i = 0; i < static_cast<int>(e.properties.size()); i++) {
          const auto& prop = e.properties[i];
          if (prop.isList) {
            const double n = tokens.next("list count");
            if (n < 0 || n != static_cast<double>(static_cast<std::size_t>(n)))
              throw FormatError("bad list count in ASCII PLY body");
            for (std::size_t k = 0; k < static_cast<std::size_t>(n); k++)
              tokens.next("list entry");
            continue;
          }
          const double v = tokens.next(
            isVertex ? "vertex" : "element", prop.type == ScalarType::Float32);
          if (i == slots.x)
            p.x = v;
          else if (i == slots.y)
            p.y = v;
          else if (i == slots.z)
            p.z = v;
        }
        if (isVertex)
          pc.points.push_back(p);
      }
    }
    return pc;
  }

  PointCloud readBinary(std::string_view bytes, const Header& h)
  {
    PointCloud pc;
    std::size_t pos = h.bodyOffset;

    const auto need = [&](std::size_t n, const char* what) {
      if (bytes.size() - pos < n)
        throw FormatError(
          std::string("truncated binary PLY body while reading ") + what, pos);
    };

    for (const auto& e : h.elements) {
      const bool isVertex = e.name == "vertex";
      XyzSlots slots;
      if (isVertex) {
        slots = findXyz(e, 0);
        pc.points.reserve(e.count);
      }
      for (std::size_t r = 0; r < e.count; r++) {
        Point3 p;
        for (int i = 0; i < static_cast<int>(e.properties.size()); i++) {
          const auto& prop = e.properties[i];
          if (prop.isList) {
            need(scalarSize(prop.countType), "list count");
            const double n = loadScalar(prop.countType, bytes.data() + pos);
            if (n < 0)
              throw FormatError("negative list count", pos);
            pos += scalarSize(prop.countType);
            const auto bytesNeeded =
              static_cast<std::size_t>(n) * scalarSize(prop.type);
            need(bytesNeeded, "list entries");
            pos += bytesNeeded;
            continue;
          }
          need(scalarSize(prop.type), isVertex ? "vertex" : "element");
          const double v = loadScalar(prop.type, bytes.data() + pos);
          pos += scalarSize(prop.type);
          if (i == slots.x)
            p.x = v;
          else if (i == slots.y)
            p.y = v;
          else if (i == slots.z)
            p.z = v;
        }
        if (isVertex)
          pc.points.push_back(p);
      }
    }
    return pc;
  }

}  // namespace

PointCloud
readPly(std::string_view bytes)
{
  const Header h = parseHeader(bytes);
  bool hasVertex = false;
  for (const auto& e : h.elements)
    hasVertex |= e.name == "vertex";
  if (!hasVertex)
    throw FormatError("PLY file has no vertex element", h.bodyOffset);

  return h.format == PlyFormat::Ascii ? readAscii(bytes, h)
                                      : readBinary(bytes, h);
}

PointCloud
readPly(std::istream& in)
{
  std::string bytes(
    (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad())
    throw IoError("failed reading PLY stream");
  return readPly(std::string_view(bytes));
}

PointCloud
loadPly(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "' for reading");
  return readPly(in);
}

//============================================================================

void
writePly(std::ostream& out, const PointCloud& cloud, PlyFormat format)
{
  out << "ply\n"
      << (format == PlyFormat::Ascii ? "format ascii 1.0\n"
                                     : "format binary_little_endian 1.0\n")
      << "element vertex " << cloud.points.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "end_header\n";

  if (format == PlyFormat::Ascii) {
    char buf[64];
    for (const auto& p : cloud.points) {
      const double xyz[3] = {p.x, p.y, p.z};
      for (int k = 0; k < 3; k++) {
        const auto [ptr, ec] =
          std::to_chars(buf, buf + sizeof(buf), static_cast<float>(xyz[k]));
        out.write(buf, ptr - buf);
        out.put(k == 2 ? '\n' : ' ');
      }
    }
  } else {
    for (const auto& p : cloud.points) {
      const float xyz[3] = {
        static_cast<float>(p.x), static_cast<float>(p.y),
        static_cast<float>(p.z)};
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    }
  }
}

std::string
writePly(const PointCloud& cloud, PlyFormat format)
{
  std::ostringstream out(std::ios::binary);
  writePly(out, cloud, format);
  return std::move(out).str();
}

void
savePly(const std::string& path, const PointCloud& cloud, PlyFormat format)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path + "' for writing");
  writePly(out, cloud, format);
  if (!out)
    throw IoError("failed writing '" + path + "'");
}

}  // namespace vxpc
