// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "container.hpp"
#include "entropy.hpp"
#include "neural.hpp"
#include "partition.hpp"
#include "synth.hpp"
#include "training.hpp"

#include "support.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace vxpc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void
report(const char* name, const std::function<Outcome()>& body)
{
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf(
    "%s  %-28s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass)
    failures++;
}

template<typename... Args>
std::string
format(const char* fmt, Args... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

struct CloudCase {
  SynthShape shape;
  int depth;
  std::size_t points;
  uint64_t seed;
  VoxelSet voxels;
};

std::vector<CloudCase>
syntheticCorpus()
{
  std::vector<CloudCase> out;
  std::mt19937_64 rng(20240601);
  const SynthShape shapes[] = {SynthShape::Sphere, SynthShape::Plane, SynthShape::Random};
  for (int i = 0; i < 100; i++) {
    CloudCase c;
    c.shape = shapes[i % 3];
    c.depth = 6 + (i / 3) % 3;
    c.points = 1 + rng() % 50000;
    c.seed = 1000 + i;
    c.voxels = voxelize(synthesize(c.shape, c.depth, c.points, c.seed), c.depth);
    out.push_back(std::move(c));
  }
  return out;
}

// Minimum cost over every valid partition tree, costed with a fresh coder
// per leaf and 2 bits per flag.
std::vector<uint64_t>
allTreeCosts(const VoxelBlock& block, int level, int maxLevel, const OccupancyModel& model)
{
  RegionState s;
  BinaryEncoder e;
  encodeSingleBlock(block, model, s, e);
  std::vector<uint64_t> out{e.bitsEmitted() + 2};
  if (level < maxLevel && block.side() / 2 >= kMinBlockSide) {
    std::vector<uint64_t> acc{2};
    for (int k = 0; k < 8; k++) {
      const auto ch = block.child((k >> 2) & 1, (k >> 1) & 1, k & 1);
      const auto options = ch.empty() ? std::vector<uint64_t>{2}
                                      : allTreeCosts(ch, level + 1, maxLevel, model);
      std::vector<uint64_t> next;
      next.reserve(acc.size() * options.size());
      for (auto a : acc)
        for (auto o : options)
          next.push_back(a + o);
      acc = std::move(next);
    }
    out.insert(out.end(), acc.begin(), acc.end());
  }
  return out;
}

std::vector<VoxelBlock>
trainingBlocks(std::size_t count, uint64_t seed)
{
  std::vector<VoxelBlock> out;
  std::mt19937_64 rng(seed);
  while (out.size() < count) {
    const auto shape = rng() % 2 ? SynthShape::Plane : SynthShape::Sphere;
    const int depth = 6 + int(rng() % 2);
    const auto v = voxelize(synthesize(shape, depth, 30000, rng()), depth);
    auto blocks = extractBlocks(v, depth, 8);
    std::shuffle(blocks.begin(), blocks.end(), rng);
    for (auto& b : blocks)
      if (out.size() < count && b.block.occupiedCount() > 0)
        out.push_back(std::move(b.block));
  }
  return out;
}

}  // namespace

int
main()
{
  const auto corpus = syntheticCorpus();
  const auto uniform = OccupancyModel::uniform();
  const auto adaptive = OccupancyModel::adaptive();
  const auto neural =
    OccupancyModel::neural(Network<float>::build(tinyArchitecture(), 777));

  report("losslessness", [&] {
    std::size_t runs = 0, bad = 0;
    for (const auto& c : corpus) {
      std::vector<const OccupancyModel*> models{&uniform, &adaptive};
      if (c.depth == 6)
        models.push_back(&neural);
      for (const auto* m : models)
        for (int lv : {1, 3, 5}) {
          const auto enc = encodeVoxels(c.voxels, {c.depth, lv, 1}, *m);
          const auto dec = decodeContainer(enc.container, &neural, 1);
          runs++;
          if (dec.voxels != c.voxels) {
            bad++;
            std::fprintf(
              stderr, "  mismatch: cloud seed %llu model %s maxLv %d\n",
              (unsigned long long)c.seed, modelName(m->id()), lv);
          }
        }
    }
    return Outcome{
      bad == 0, format("%zu clouds, %zu encode/decode runs, %zu mismatches",
                       corpus.size(), runs, bad)};
  });

  report("reference parameter count", [] {
    const auto n = Network<float>::build(referenceArchitecture(), 1).parameterCount();
    return Outcome{n == 290754, format("%zu parameters", n)};
  });

  report("masks and causality", [] {
    bool ok = true;
    std::string counts;
    for (int k : {3, 5, 7}) {
      const auto a = makeMask(k, MaskType::A);
      const auto b = makeMask(k, MaskType::B);
      const long na = std::count(a.begin(), a.end(), 1);
      const long nb = std::count(b.begin(), b.end(), 1);
      ok = ok && na == k * k * k / 2 && nb == k * k * k / 2 + 1;
      counts += format("k%d:%ld/%ld ", k, na, nb);
    }
    std::mt19937_64 rng(4242);
    const auto tiny = Network<float>::build(tinyArchitecture(), 31);
    const auto reference = Network<float>::build(referenceArchitecture(), 32);
    std::size_t changed = 0;
    for (int trial = 0; trial < 200; trial++) {
      const auto& net = trial < 150 ? tiny : reference;
      auto block = test::randomBlock(8, 0.05 + 0.9 * double(rng() % 100) / 100, rng);
      const auto base = forwardProbabilities(net, block);
      const std::size_t j = rng() % block.volume();
      block[j] ^= 1;
      for (std::size_t k = j + 1; k < block.volume(); k++)
        if (rng() % 2)
          block[k] ^= 1;
      const auto after = forwardProbabilities(net, block);
      for (std::size_t i = 0; i <= j; i++)
        changed += std::bit_cast<uint32_t>(base[i].p0) != std::bit_cast<uint32_t>(after[i].p0)
          || std::bit_cast<uint32_t>(base[i].p1) != std::bit_cast<uint32_t>(after[i].p1);
    }
    return Outcome{
      ok && changed == 0,
      format("%s; 200 trials, %zu changed probabilities", counts.c_str(), changed)};
  });

  report("one-pass vs sequential", [] {
    std::mt19937_64 rng(99);
    const auto net = Network<float>::build(tinyArchitecture(), 5);
    std::size_t diffs = 0, compared = 0;
    for (int trial = 0; trial < 20; trial++) {
      const auto block = test::randomBlock(8, 0.1 + 0.04 * trial, rng);
      const auto whole = forwardProbabilities(net, block);
      VoxelBlock partial(8);
      BlockEvaluator<float> incremental(net, 8);
      for (std::size_t i = 0; i < block.volume(); i++) {
        const auto seq = forwardProbabilities(net, partial)[i];
        incremental.evaluateAt(i);
        const auto inc = incremental.probabilityAt(i);
        diffs += std::bit_cast<uint32_t>(seq.p1) != std::bit_cast<uint32_t>(whole[i].p1);
        diffs += std::bit_cast<uint32_t>(inc.p1) != std::bit_cast<uint32_t>(whole[i].p1);
        compared += 2;
        partial[i] = block[i];
        incremental.setVoxel(i, block[i]);
      }
    }
    return Outcome{diffs == 0, format("%zu comparisons, %zu differ", compared, diffs)};
  });

  report("gradient check", [] {
    std::mt19937_64 rng(2718);
    double worst = 0;
    std::size_t params = 0, reduced = 0;
    for (int trial = 0; trial < 3; trial++) {
      auto net = Network<double>::build(tinyArchitecture(), 60 + trial);
      test::randomizeBiases(net, rng);
      const auto block = test::randomBlock(4, 0.3 + 0.15 * trial, rng);
      const auto r = test::checkGradients(net, block, 1e-4);
      worst = std::max(worst, r.maxRelativeError);
      params += r.parameters;
      reduced += r.reducedStep;
    }
    return Outcome{
      worst <= 1e-4,
      format("%zu parameter checks, max relative error %.3g "
             "(%zu straddled a relu kink at eps 1e-4 and used a smaller step)",
             params, worst, reduced)};
  });

  report("coder efficiency", [] {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<uint32_t> prob(kMinProbability, kMaxProbability);
    std::uniform_real_distribution<double> unit(0, 1);
    bool ok = true;
    double worstExcess = -1e300;
    for (int stream = 0; stream < 5; stream++) {
      const std::size_t n = 100000;
      std::vector<uint32_t> ps(n);
      std::vector<uint8_t> bits(n);
      BinaryEncoder enc;
      double ideal = 0;
      for (std::size_t i = 0; i < n; i++) {
        ps[i] = prob(rng);
        bits[i] = unit(rng) < double(ps[i]) / kProbabilityOne;
        ideal += test::idealBits(bits[i], ps[i]);
        enc.encodeBit(bits[i], ps[i]);
      }
      const auto word = enc.flush();
      const double excess = std::abs(8.0 * word.size() - ideal);
      ok = ok && excess <= 0.002 * ideal + 64;
      worstExcess = std::max(worstExcess, excess - 0.002 * ideal - 64);
      BinaryDecoder dec(word);
      for (std::size_t i = 0; i < n; i++)
        ok = ok && dec.decodeBit(ps[i]) == bool(bits[i]);
    }
    return Outcome{
      ok, format("5 x 1e5 symbols, worst margin to bound %.1f bits", -worstExcess)};
  });

  report("partition optimality", [&] {
    std::mt19937_64 rng(161);
    std::size_t mismatches = 0, tieViolations = 0, worse = 0, splits = 0, ties = 0;
    for (int trial = 0; trial < 50; trial++) {
      VoxelBlock block;
      switch (trial % 3) {
      case 0: block = test::clusteredBlock(16, rng); break;
      case 1: block = test::randomBlock(16, 0.001 + 0.004 * (trial % 10), rng); break;
      default: block = test::randomBlock(16, 0.1 + 0.02 * (trial % 20), rng); break;
      }
      if (block.empty()) {
        trial--;
        continue;
      }
      RegionState s;
      const auto plan = partitionBlock(block, 1, 3, uniform, s);
      const auto costs = allTreeCosts(block, 1, 3, uniform);
      const auto best = *std::min_element(costs.begin(), costs.end());
      mismatches += plan.cost() != best;
      worse += plan.cost() > costs.front();
      if (best == costs.front()) {
        tieViolations += plan.flags.size() != 1;
        ties += std::count(costs.begin(), costs.end(), best) > 1;
      }
      splits += plan.flags.size() > 1;
    }
    return Outcome{
      mismatches == 0 && tieViolations == 0 && worse == 0,
      format("50 blocks (%zu split, %zu exact ties), %zu cost mismatches, "
             "%zu tie violations",
             splits, ties, mismatches, tieViolations)};
  });

  report("partition-depth monotonicity", [&] {
    std::size_t checked = 0, violations = 0;
    for (const auto& c : corpus) {
      std::vector<const OccupancyModel*> models{&uniform, &adaptive};
      if (c.depth == 6)
        models.push_back(&neural);
      for (const auto* m : models) {
        const auto s1 = encodeVoxels(c.voxels, {c.depth, 1, 1}, *m).container.size();
        const auto s2 = encodeVoxels(c.voxels, {c.depth, 2, 1}, *m).container.size();
        const auto s4 = encodeVoxels(c.voxels, {c.depth, 4, 1}, *m).container.size();
        checked++;
        if (!(s4 <= s2 && s2 <= s1)) {
          violations++;
          std::fprintf(
            stderr, "  non-monotone: seed %llu model %s sizes %zu %zu %zu\n",
            (unsigned long long)c.seed, modelName(m->id()), s1, s2, s4);
        }
      }
    }
    return Outcome{
      violations == 0, format("%zu cloud/model pairs, %zu violations", checked, violations)};
  });

  report("training smoke", [] {
    const auto blocks = trainingBlocks(200, 8);
    auto net = Network<double>::build(tinyArchitecture(), 2024);
    TrainingConfig cfg;
    cfg.epochs = 20;
    cfg.batchSize = 8;
    cfg.seed = 7;
    const auto history = train(net, blocks, cfg);
    const double first = history.epochMeanBits.front();
    const double last = history.epochMeanBits.back();

    const auto trained = OccupancyModel::neural(net.cast<float>());
    double neuralBpov = 0, uniformBpov = 0;
    std::size_t voxels = 0;
    uint64_t neuralBits = 0, uniformBits = 0;
    for (auto shape : {SynthShape::Sphere, SynthShape::Plane}) {
      const auto v = voxelize(synthesize(shape, 6, 20000, 555), 6);
      const auto en = encodeVoxels(v, {6, 4, 1}, trained);
      const auto eu = encodeVoxels(v, {6, 4, 1}, OccupancyModel::uniform());
      if (decodeContainer(en.container, &trained).voxels != v)
        return Outcome{false, "trained model failed to round trip"};
      neuralBits += en.totalBits();
      uniformBits += eu.totalBits();
      voxels += v.size();
    }
    neuralBpov = bpov(neuralBits, voxels);
    uniformBpov = bpov(uniformBits, voxels);
    return Outcome{
      last < first && neuralBpov < uniformBpov,
      format("CE %.2f -> %.2f bits/block; held-out bpov %.4f vs uniform %.4f",
             first, last, neuralBpov, uniformBpov)};
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
