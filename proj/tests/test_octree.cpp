#include "errors.hpp"
#include "octree.hpp"

#include <doctest.h>

#include <algorithm>
#include <deque>
#include <random>
#include <set>

using namespace vxpc;

namespace {

// Breadth-first walk over cubes, written independently of the library.
std::vector<uint8_t>
oracleBytes(const std::set<Voxel>& origins, int depth)
{
  struct Node {
    Voxel o;
    int side;
  };
  auto occupied = [&](const Node& n) {
    for (const auto& v : origins)
      if (
        v.x >= n.o.x && v.x < n.o.x + n.side && v.y >= n.o.y
        && v.y < n.o.y + n.side && v.z >= n.o.z && v.z < n.o.z + n.side)
        return true;
    return false;
  };
  std::vector<uint8_t> out;
  std::deque<Node> q{{{0, 0, 0}, 1 << depth}};
  while (!q.empty()) {
    const Node n = q.front();
    q.pop_front();
    if (n.side == 64)
      continue;
    const int h = n.side / 2;
    uint8_t byte = 0;
    for (int k = 0; k < 8; k++) {
      const Node c{
        {n.o.x + ((k >> 2) & 1) * h, n.o.y + ((k >> 1) & 1) * h,
         n.o.z + (k & 1) * h},
        h};
      if (occupied(c)) {
        byte |= uint8_t(0x80 >> k);
        q.push_back(c);
      }
    }
    out.push_back(byte);
  }
  return out;
}

std::vector<BlockLocation>
locations(const std::set<Voxel>& s)
{
  std::vector<BlockLocation> out;
  for (const auto& v : s)
    out.push_back({v, 64});
  return out;
}

}  // namespace

TEST_CASE("octree byte examples")
{
  const std::vector<BlockLocation> one{{{0, 0, 0}, 64}};
  CHECK(serializeOctree(buildOctree(one, 7)) == std::vector<uint8_t>{0x80});

  const std::vector<BlockLocation> two{{{0, 0, 0}, 64}, {{64, 64, 64}, 64}};
  CHECK(serializeOctree(buildOctree(two, 7)) == std::vector<uint8_t>{0x81});

  CHECK(serializeOctree(buildOctree(one, 6)).empty());
  const auto p6 = parseOctree({}, 6);
  REQUIRE(p6.origins.size() == 1);
  CHECK(p6.origins[0].origin == Voxel{0, 0, 0});
  CHECK(p6.bytesConsumed == 0);

  const std::vector<BlockLocation> deep{{{448, 64, 256}, 64}};
  const auto bytes9 = serializeOctree(buildOctree(deep, 9));
  CHECK(bytes9.size() == 3);
  CHECK(std::all_of(bytes9.begin(), bytes9.end(), [](uint8_t b) { return b != 0; }));
}

TEST_CASE("octree matches breadth-first oracle and round trips")
{
  std::mt19937_64 rng(17);
  for (int depth : {7, 8, 9}) {
    const int cells = 1 << (depth - 6);
    std::uniform_int_distribution<int> c(0, cells - 1);
    for (int trial = 0; trial < 30; trial++) {
      std::set<Voxel> origins;
      const int count = 1 + int(rng() % 20);
      for (int i = 0; i < count; i++)
        origins.insert({64 * c(rng), 64 * c(rng), 64 * c(rng)});
      auto locs = locations(origins);
      std::shuffle(locs.begin(), locs.end(), rng);

      const auto bytes = serializeOctree(buildOctree(locs, depth));
      CHECK(bytes == oracleBytes(origins, depth));

      std::vector<uint8_t> padded = bytes;
      padded.push_back(0xAB);
      const auto parsed = parseOctree(padded, depth);
      CHECK(parsed.bytesConsumed == bytes.size());
      CHECK(parsed.origins == locations(origins));
    }
  }
}

TEST_CASE("octree errors")
{
  const std::vector<BlockLocation> bad{{{32, 0, 0}, 64}};
  CHECK_THROWS_AS(buildOctree(bad, 7), ArgumentError);
  const std::vector<BlockLocation> outside{{{128, 0, 0}, 64}};
  CHECK_THROWS_AS(buildOctree(outside, 7), ArgumentError);

  const std::vector<uint8_t> zero{0x80, 0x00};
  CHECK_THROWS_AS(parseOctree(zero, 8), FormatError);
  const std::vector<uint8_t> root0{0x00};
  CHECK_THROWS_AS(parseOctree(root0, 7), FormatError);
  const std::vector<uint8_t> truncated{0xC0, 0x80};
  CHECK_THROWS_AS(parseOctree(truncated, 8), FormatError);
}
