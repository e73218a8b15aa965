#include "synth.hpp"

#include "errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <random>

namespace vxpc {

std::optional<SynthShape>
parseSynthShape(std::string_view name)
{
  if (name == "sphere")
    return SynthShape::Sphere;
  if (name == "plane")
    return SynthShape::Plane;
  if (name == "random")
    return SynthShape::Random;
  return std::nullopt;
}

PointCloud
synthesize(SynthShape shape, int depth, std::size_t count, uint64_t seed)
{
  checkDepth(depth);
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  const double side = std::ldexp(1.0, depth);
  // Rounds to float32 while staying strictly below `bound`.
  const auto snap = [](double v, double bound) {
    const auto f = static_cast<float>(v);
    const auto b = static_cast<float>(bound);
    return double(f >= b ? std::nextafter(b, 0.0f) : f);
  };

  PointCloud pc;
  pc.points.reserve(count);
  for (std::size_t i = 0; i < count; i++) {
    Point3 p;
    double zBound = side;
    switch (shape) {
    case SynthShape::Sphere: {
      const double c = side / 2;
      const double r = 0.4 * side;
      const double z = 2 * uniform() - 1;
      const double phi = 2 * std::numbers::pi * uniform();
      const double s = std::sqrt(std::max(0.0, 1 - z * z));
      p = {c + r * s * std::cos(phi), c + r * s * std::sin(phi), c + r * z};
      break;
    }
    case SynthShape::Plane:
      p = {uniform() * side, uniform() * side, side / 2 + 2 * uniform()};
      zBound = side / 2 + 2;
      break;
    case SynthShape::Random:
      p = {uniform() * side, uniform() * side, uniform() * side};
      break;
    }
    pc.points.push_back({snap(p.x, side), snap(p.y, side), snap(p.z, zBound)});
  }
  return pc;
}

uint64_t
defaultSeed(uint64_t fallback)
{
  const char* env = std::getenv("VXPC_SEED");
  if (!env || !*env)
    return fallback;
  uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
  if (ec != std::errc() || *ptr != '\0')
    return fallback;
  return v;
}

}  // namespace vxpc
