// vxpc command-line front end. Uses only the C API.
//
// Exit codes: 0 ok, 1 argument error, 2 I/O error, 3 format error.

#include "vxpc/vxpc.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum ExitCode
{
  kExitOk = 0,
  kExitArgs = 1,
  kExitIo = 2,
  kExitFormat = 3,
};

struct CloudDeleter {
  void operator()(vxpc_cloud* c) const { vxpc_cloud_free(c); }
};
struct ModelDeleter {
  void operator()(vxpc_model* m) const { vxpc_model_free(m); }
};
struct BufferDeleter {
  void operator()(vxpc_buffer* b) const { vxpc_buffer_free(b); }
};
struct ReportDeleter {
  void operator()(vxpc_report* r) const { vxpc_report_free(r); }
};
using CloudPtr = std::unique_ptr<vxpc_cloud, CloudDeleter>;
using ModelPtr = std::unique_ptr<vxpc_model, ModelDeleter>;
using BufferPtr = std::unique_ptr<vxpc_buffer, BufferDeleter>;
using ReportPtr = std::unique_ptr<vxpc_report, ReportDeleter>;

// Carries a status out of a subcommand.
struct Failure {
  int code;
  std::string message;
};

void
check(vxpc_status s, const std::string& context)
{
  if (s == VXPC_OK)
    return;
  const int code = s == VXPC_ERR_ARGUMENT ? kExitArgs
    : s == VXPC_ERR_IO                    ? kExitIo
                                          : kExitFormat;
  throw Failure{code, context + ": " + vxpc_last_error()};
}

[[noreturn]] void
argumentError(const std::string& message)
{
  throw Failure{kExitArgs, message};
}

const std::map<std::string, vxpc_model_kind> kModelNames{
  {"uniform", VXPC_MODEL_UNIFORM},
  {"adaptive", VXPC_MODEL_ADAPTIVE},
  {"voxeldnn", VXPC_MODEL_VOXELDNN},
};

const char*
modelLabel(vxpc_model_kind k)
{
  switch (k) {
  case VXPC_MODEL_UNIFORM: return "uniform";
  case VXPC_MODEL_ADAPTIVE: return "adaptive";
  case VXPC_MODEL_VOXELDNN: return "voxeldnn";
  }
  return "?";
}

ModelPtr
makeModel(vxpc_model_kind kind, const std::string& weights)
{
  if (kind == VXPC_MODEL_VOXELDNN && weights.empty())
    argumentError("--model voxeldnn requires --weights");
  if (kind != VXPC_MODEL_VOXELDNN && !weights.empty())
    argumentError("--weights is only meaningful with --model voxeldnn");
  vxpc_model* m = nullptr;
  check(
    vxpc_model_create(kind, weights.empty() ? nullptr : weights.c_str(), &m),
    "loading model");
  return ModelPtr(m);
}

CloudPtr
loadCloud(const std::string& path)
{
  vxpc_cloud* c = nullptr;
  check(vxpc_cloud_load_ply(path.c_str(), &c), "reading " + path);
  return CloudPtr(c);
}

void
writeText(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw Failure{kExitIo, "cannot write " + path};
}

//============================================================================

struct EncodeArgs {
  std::string input, output, model = "uniform", weights, csv;
  int depth = 10;
  int maxLevel = 1;
  int threads = 1;
};

int
runEncode(const EncodeArgs& a)
{
  auto model = makeModel(kModelNames.at(a.model), a.weights);
  auto cloud = loadCloud(a.input);

  const vxpc_encode_options opt{a.depth, a.maxLevel, a.threads};
  vxpc_buffer* buf = nullptr;
  vxpc_report* rep = nullptr;
  check(vxpc_encode(cloud.get(), &opt, model.get(), &buf, &rep), "encoding");
  BufferPtr container(buf);
  ReportPtr report(rep);
  check(vxpc_buffer_save(container.get(), a.output.c_str()), "writing output");

  vxpc_summary s;
  vxpc_report_summary(report.get(), &s);
  std::printf(
    "encoded %s -> %s\n"
    "  model          %s, depth %d, max level %d\n"
    "  points         %zu\n"
    "  voxels         %llu in %llu blocks\n"
    "  framing        %llu bytes\n"
    "  octree         %llu bytes\n"
    "  flags          %llu bytes\n"
    "  payload        %llu bytes\n"
    "  total          %llu bytes (%llu bits)\n"
    "  bpov           %.6f\n"
    "  time           %.3f s\n",
    a.input.c_str(), a.output.c_str(), a.model.c_str(), a.depth, a.maxLevel,
    vxpc_cloud_size(cloud.get()), (unsigned long long)s.occupied_voxels,
    (unsigned long long)s.blocks,
    (unsigned long long)s.header_bytes, (unsigned long long)s.octree_bytes,
    (unsigned long long)s.flag_bytes, (unsigned long long)s.payload_bytes,
    (unsigned long long)s.container_bytes,
    (unsigned long long)(8 * s.container_bytes), s.bpov, s.seconds);

  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv << "block,origin_x,origin_y,origin_z,occupied_voxels,leaves,"
           "coded_voxels,flags,flag_bytes,payload_bytes,total_bytes\n";
    for (size_t i = 0; i < vxpc_report_block_count(report.get()); i++) {
      vxpc_block_stats b;
      check(vxpc_report_block(report.get(), i, &b), "report");
      csv << i << ',' << b.origin[0] << ',' << b.origin[1] << ','
          << b.origin[2] << ',' << b.occupied_voxels << ',' << b.leaves << ','
          << b.coded_voxels << ',' << b.flags << ',' << b.flag_bytes << ',' << b.payload_bytes << ','
          << b.total_bytes << '\n';
    }
    csv << "total,,,," << s.occupied_voxels << ",," << s.coded_voxels << ",,"
        << s.flag_bytes << ',' << s.payload_bytes << ',' << s.container_bytes
        << '\n';
    writeText(a.csv, csv.str());
  }
  return kExitOk;
}

//============================================================================

struct DecodeArgs {
  std::string input, output, weights;
  int threads = 1;
  bool ascii = false;
};

int
runDecode(const DecodeArgs& a)
{
  ModelPtr weights;
  if (!a.weights.empty())
    weights = makeModel(VXPC_MODEL_VOXELDNN, a.weights);

  vxpc_buffer* buf = nullptr;
  check(vxpc_buffer_load(a.input.c_str(), &buf), "reading " + a.input);
  BufferPtr container(buf);

  vxpc_cloud* out = nullptr;
  check(
    vxpc_decode(
      vxpc_buffer_data(container.get()), vxpc_buffer_size(container.get()),
      weights.get(), a.threads, &out),
    "decoding " + a.input);
  CloudPtr cloud(out);
  check(
    vxpc_cloud_save_ply(cloud.get(), a.output.c_str(), a.ascii ? 0 : 1),
    "writing " + a.output);
  std::printf(
    "decoded %s -> %s (%zu voxels)\n", a.input.c_str(), a.output.c_str(),
    vxpc_cloud_size(cloud.get()));
  return kExitOk;
}

//============================================================================

struct EvalArgs {
  std::string input, weights, csv;
  std::vector<std::string> models{"uniform", "adaptive"};
  std::vector<int> levels{1, 2, 3, 4, 5};
  int depth = 10;
  int threads = 1;
};

int
runEval(const EvalArgs& a)
{
  auto cloud = loadCloud(a.input);

  std::ostringstream csv;
  csv << "model,max_level,container_bytes,bits,occupied_voxels,coded_voxels,"
         "bpov,bits_per_coded_voxel,seconds\n";
  std::printf(
    "%-10s %9s %12s %10s %12s %10s %10s %8s\n", "model", "max_level", "bytes",
    "voxels", "coded", "bpov", "bpcv", "seconds");

  for (const auto& name : a.models) {
    const auto kind = kModelNames.at(name);
    auto model =
      makeModel(kind, kind == VXPC_MODEL_VOXELDNN ? a.weights : std::string());
    for (int level : a.levels) {
      const vxpc_encode_options opt{a.depth, level, a.threads};
      vxpc_buffer* buf = nullptr;
      vxpc_report* rep = nullptr;
      check(vxpc_encode(cloud.get(), &opt, model.get(), &buf, &rep), "encoding");
      BufferPtr container(buf);
      ReportPtr report(rep);
      vxpc_summary s;
      vxpc_report_summary(report.get(), &s);
      const double bpcv =
        double(8 * s.container_bytes) / double(s.coded_voxels);
      std::printf(
        "%-10s %9d %12llu %10llu %12llu %10.6f %10.6f %8.3f\n",
        modelLabel(kind), level, (unsigned long long)s.container_bytes,
        (unsigned long long)s.occupied_voxels,
        (unsigned long long)s.coded_voxels, s.bpov, bpcv, s.seconds);
      char line[320];
      std::snprintf(
        line, sizeof(line), "%s,%d,%llu,%llu,%llu,%llu,%.17g,%.17g,%.6f\n",
        modelLabel(kind), level, (unsigned long long)s.container_bytes,
        (unsigned long long)(8 * s.container_bytes),
        (unsigned long long)s.occupied_voxels,
        (unsigned long long)s.coded_voxels, s.bpov, bpcv, s.seconds);
      csv << line;
    }
  }
  if (!a.csv.empty())
    writeText(a.csv, csv.str());
  return kExitOk;
}

//============================================================================

struct SynthArgs {
  std::string shape = "sphere", output;
  int depth = 8;
  size_t points = 10000;
  std::optional<uint64_t> seed;
  bool ascii = false;
};

int
runSynth(const SynthArgs& a)
{
  const std::map<std::string, vxpc_shape> shapes{
    {"sphere", VXPC_SHAPE_SPHERE},
    {"plane", VXPC_SHAPE_PLANE},
    {"random", VXPC_SHAPE_RANDOM}};
  const uint64_t seed = a.seed ? *a.seed : vxpc_default_seed(1);
  vxpc_cloud* c = nullptr;
  check(
    vxpc_synthesize(shapes.at(a.shape), a.depth, a.points, seed, &c),
    "synthesizing");
  CloudPtr cloud(c);
  check(
    vxpc_cloud_save_ply(cloud.get(), a.output.c_str(), a.ascii ? 0 : 1),
    "writing " + a.output);
  std::printf(
    "wrote %zu %s points (depth %d, seed %llu) to %s\n", a.points,
    a.shape.c_str(), a.depth, (unsigned long long)seed, a.output.c_str());
  return kExitOk;
}

//============================================================================

struct WeightsArgs {
  std::string arch = "tiny", output, trainInput;
  std::optional<uint64_t> seed;
  int depth = 10;
  int blockSide = 8;
  int epochs = 10;
  int batch = 8;
};

int
runWeights(const WeightsArgs& a)
{
  const uint64_t seed = a.seed ? *a.seed : vxpc_default_seed(1);
  vxpc_model* m = nullptr;
  check(
    vxpc_model_create_random(
      a.arch == "reference" ? VXPC_ARCH_REFERENCE : VXPC_ARCH_TINY, seed, &m),
    "building network");
  ModelPtr model(m);

  if (!a.trainInput.empty()) {
    auto cloud = loadCloud(a.trainInput);
    std::vector<double> history(std::max(a.epochs, 0));
    check(
      vxpc_model_train(
        model.get(), cloud.get(), a.depth, a.blockSide, a.epochs, a.batch,
        seed, history.data()),
      "training");
    for (size_t e = 0; e < history.size(); e++)
      std::printf("epoch %zu: %.4f bits/block\n", e + 1, history[e]);
  }
  check(vxpc_model_save(model.get(), a.output.c_str()), "writing weights");
  std::printf(
    "wrote %s network (%zu parameters, checksum %016llx) to %s\n",
    a.arch.c_str(), vxpc_model_parameter_count(model.get()),
    (unsigned long long)vxpc_model_checksum(model.get()), a.output.c_str());
  return kExitOk;
}

}  // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"vxpc: lossless point-cloud geometry codec"};
  app.require_subcommand(1);

  std::vector<std::string> modelChoices{"uniform", "adaptive", "voxeldnn"};

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Encode a PLY point cloud");
  encode->add_option("--input,-i", enc.input, "Input PLY")->required();
  encode->add_option("--output,-o", enc.output, "Output container")->required();
  encode->add_option("--depth,-n", enc.depth, "Grid bit depth (>= 6)")->required();
  encode->add_option("--max-level,-L", enc.maxLevel, "Partition levels, 1..5");
  encode->add_option("--model,-m", enc.model, "Occupancy model")
    ->check(CLI::IsMember(modelChoices));
  encode->add_option("--weights,-w", enc.weights, "VXDN weights (voxeldnn)");
  encode->add_option("--threads,-t", enc.threads, "Worker threads")
    ->check(CLI::PositiveNumber);
  encode->add_option("--csv", enc.csv, "Write per-block CSV report");

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Decode a container to PLY");
  decode->add_option("--input,-i", dec.input, "Input container")->required();
  decode->add_option("--output,-o", dec.output, "Output PLY")->required();
  decode->add_option("--weights,-w", dec.weights, "VXDN weights (voxeldnn)");
  decode->add_option("--threads,-t", dec.threads, "Worker threads")
    ->check(CLI::PositiveNumber);
  decode->add_flag("--ascii", dec.ascii, "Write ASCII PLY");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Sweep models and partition levels");
  eval->add_option("--input,-i", ev.input, "Input PLY")->required();
  eval->add_option("--depth,-n", ev.depth, "Grid bit depth (>= 6)")->required();
  eval->add_option("--models", ev.models, "Models to evaluate")
    ->delimiter(',')
    ->check(CLI::IsMember(modelChoices));
  eval->add_option("--levels", ev.levels, "Max levels to sweep")
    ->delimiter(',')
    ->check(CLI::Range(1, 5));
  eval->add_option("--weights,-w", ev.weights, "VXDN weights (voxeldnn)");
  eval->add_option("--threads,-t", ev.threads, "Worker threads")
    ->check(CLI::PositiveNumber);
  eval->add_option("--csv", ev.csv, "Write results as CSV");

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic point cloud");
  synth->add_option("--shape", syn.shape, "sphere, plane or random")
    ->check(CLI::IsMember({"sphere", "plane", "random"}));
  synth->add_option("--depth,-n", syn.depth, "Grid bit depth (>= 6)");
  synth->add_option("--points,-k", syn.points, "Number of points");
  synth->add_option("--output,-o", syn.output, "Output PLY")->required();
  synth->add_option("--seed", syn.seed, "RNG seed (default: $VXPC_SEED or 1)");
  synth->add_flag("--ascii", syn.ascii, "Write ASCII PLY");

  WeightsArgs wa;
  auto* weights =
    app.add_subcommand("weights", "Create (and optionally train) VXDN weights");
  weights->add_option("--arch", wa.arch, "tiny or reference")
    ->check(CLI::IsMember({"tiny", "reference"}));
  weights->add_option("--output,-o", wa.output, "Output weight file")->required();
  weights->add_option("--seed", wa.seed, "Init/shuffle seed");
  weights->add_option("--train-input", wa.trainInput, "PLY to train on");
  weights->add_option("--depth,-n", wa.depth, "Grid bit depth of training PLY");
  weights->add_option("--block-side", wa.blockSide, "Training block side");
  weights->add_option("--epochs", wa.epochs, "Training epochs");
  weights->add_option("--batch", wa.batch, "Batch size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitArgs;
  }

  try {
    if (*encode)
      return runEncode(enc);
    if (*decode)
      return runDecode(dec);
    if (*eval)
      return runEval(ev);
    if (*synth)
      return runSynth(syn);
    if (*weights)
      return runWeights(wa);
  } catch (const Failure& f) {
    std::fprintf(stderr, "vxpc: %s\n", f.message.c_str());
    return f.code;
  }
  return kExitArgs;
}
