#include "vxpc/vxpc.h"

#include "bytes.hpp"
#include "container.hpp"
#include "errors.hpp"
#include "ply.hpp"
#include "synth.hpp"
#include "training.hpp"
#include "weights.hpp"

#include <new>
#include <string>

struct vxpc_cloud {
  vxpc::PointCloud cloud;
  mutable std::vector<double> flat;  // filled by vxpc_cloud_points
};

struct vxpc_model {
  vxpc::OccupancyModel model;
};

struct vxpc_buffer {
  std::vector<uint8_t> bytes;
};

struct vxpc_report {
  vxpc::EncodeResult result;
};

namespace {

thread_local std::string lastError;

vxpc_status
fail(vxpc_status status, const std::string& message)
{
  lastError = message;
  return status;
}

// Runs `fn`, mapping exceptions onto status codes.
template<typename Fn>
vxpc_status
guarded(Fn&& fn)
{
  try {
    fn();
    lastError.clear();
    return VXPC_OK;
  } catch (const vxpc::Error& e) {
    return fail(static_cast<vxpc_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VXPC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VXPC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VXPC_ERR_INTERNAL, "unknown error");
  }
}

#define VXPC_REQUIRE(cond, what)                                             \
  do {                                                                       \
    if (!(cond))                                                             \
      throw vxpc::ArgumentError(what);                                       \
  } while (0)

}  // namespace

extern "C" {

const char*
vxpc_version(void)
{
  return "1.0.0";
}

const char*
vxpc_last_error(void)
{
  return lastError.c_str();
}

//============================================================================

vxpc_status
vxpc_cloud_load_ply(const char* path, vxpc_cloud** out)
{
  return guarded([&] {
    VXPC_REQUIRE(path && out, "null argument");
    *out = nullptr;
    auto c = std::make_unique<vxpc_cloud>();
    c->cloud = vxpc::loadPly(path);
    *out = c.release();
  });
}

vxpc_status
vxpc_cloud_from_points(const double* xyz, size_t count, vxpc_cloud** out)
{
  return guarded([&] {
    VXPC_REQUIRE(out && (xyz || count == 0), "null argument");
    *out = nullptr;
    auto c = std::make_unique<vxpc_cloud>();
    c->cloud.points.reserve(count);
    for (size_t i = 0; i < count; i++)
      c->cloud.points.push_back({xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]});
    *out = c.release();
  });
}

vxpc_status
vxpc_cloud_save_ply(const vxpc_cloud* cloud, const char* path, int binary)
{
  return guarded([&] {
    VXPC_REQUIRE(cloud && path, "null argument");
    vxpc::savePly(
      path, cloud->cloud,
      binary ? vxpc::PlyFormat::BinaryLittleEndian : vxpc::PlyFormat::Ascii);
  });
}

size_t
vxpc_cloud_size(const vxpc_cloud* cloud)
{
  return cloud ? cloud->cloud.points.size() : 0;
}

const double*
vxpc_cloud_points(const vxpc_cloud* cloud)
{
  if (!cloud)
    return nullptr;
  const auto* c = cloud;
  if (c->flat.size() != 3 * c->cloud.points.size()) {
    c->flat.clear();
    c->flat.reserve(3 * c->cloud.points.size());
    for (const auto& p : c->cloud.points) {
      c->flat.push_back(p.x);
      c->flat.push_back(p.y);
      c->flat.push_back(p.z);
    }
  }
  return c->flat.data();
}

vxpc_status
vxpc_cloud_voxel_count(const vxpc_cloud* cloud, int depth, size_t* out)
{
  return guarded([&] {
    VXPC_REQUIRE(cloud && out, "null argument");
    *out = vxpc::voxelize(cloud->cloud, depth).size();
  });
}

void
vxpc_cloud_free(vxpc_cloud* cloud)
{
  delete cloud;
}

vxpc_status
vxpc_synthesize(
  vxpc_shape shape, int depth, size_t count, uint64_t seed, vxpc_cloud** out)
{
  return guarded([&] {
    VXPC_REQUIRE(out, "null argument");
    *out = nullptr;
    vxpc::SynthShape s;
    switch (shape) {
    case VXPC_SHAPE_SPHERE: s = vxpc::SynthShape::Sphere; break;
    case VXPC_SHAPE_PLANE: s = vxpc::SynthShape::Plane; break;
    case VXPC_SHAPE_RANDOM: s = vxpc::SynthShape::Random; break;
    default: throw vxpc::ArgumentError("unknown shape");
    }
    auto c = std::make_unique<vxpc_cloud>();
    c->cloud = vxpc::synthesize(s, depth, count, seed);
    *out = c.release();
  });
}

uint64_t
vxpc_default_seed(uint64_t fallback)
{
  return vxpc::defaultSeed(fallback);
}

//============================================================================

vxpc_status
vxpc_model_create(vxpc_model_kind kind, const char* weights_path, vxpc_model** out)
{
  return guarded([&] {
    VXPC_REQUIRE(out, "null argument");
    *out = nullptr;
    auto m = std::make_unique<vxpc_model>();
    switch (kind) {
    case VXPC_MODEL_UNIFORM: m->model = vxpc::OccupancyModel::uniform(); break;
    case VXPC_MODEL_ADAPTIVE: m->model = vxpc::OccupancyModel::adaptive(); break;
    case VXPC_MODEL_VOXELDNN:
      VXPC_REQUIRE(weights_path && *weights_path, "voxeldnn requires a weights file");
      m->model =
        vxpc::OccupancyModel::neural(vxpc::loadWeights(weights_path).network);
      break;
    default: throw vxpc::ArgumentError("unknown model kind");
    }
    *out = m.release();
  });
}

vxpc_status
vxpc_model_create_random(vxpc_architecture arch, uint64_t seed, vxpc_model** out)
{
  return guarded([&] {
    VXPC_REQUIRE(out, "null argument");
    *out = nullptr;
    vxpc::ArchitectureConfig cfg;
    switch (arch) {
    case VXPC_ARCH_REFERENCE: cfg = vxpc::referenceArchitecture(); break;
    case VXPC_ARCH_TINY: cfg = vxpc::tinyArchitecture(); break;
    default: throw vxpc::ArgumentError("unknown architecture");
    }
    auto m = std::make_unique<vxpc_model>();
    m->model =
      vxpc::OccupancyModel::neural(vxpc::Network<float>::build(cfg, seed));
    *out = m.release();
  });
}

vxpc_model_kind
vxpc_model_get_kind(const vxpc_model* model)
{
  return model ? static_cast<vxpc_model_kind>(model->model.id())
               : VXPC_MODEL_UNIFORM;
}

size_t
vxpc_model_parameter_count(const vxpc_model* model)
{
  if (!model || !model->model.network())
    return 0;
  return model->model.network()->parameterCount();
}

uint64_t
vxpc_model_checksum(const vxpc_model* model)
{
  return model ? model->model.checksum() : 0;
}

vxpc_status
vxpc_model_save(const vxpc_model* model, const char* path)
{
  return guarded([&] {
    VXPC_REQUIRE(model && path, "null argument");
    VXPC_REQUIRE(model->model.network(), "only voxeldnn models have weights");
    vxpc::saveWeights(path, *model->model.network());
  });
}

vxpc_status
vxpc_model_train(
  vxpc_model* model, const vxpc_cloud* cloud, int depth, int block_side,
  int epochs, int batch_size, uint64_t seed, double* epoch_bits)
{
  return guarded([&] {
    VXPC_REQUIRE(model && cloud, "null argument");
    VXPC_REQUIRE(model->model.network(), "only voxeldnn models can be trained");
    VXPC_REQUIRE(
      vxpc::isValidBlockSide(block_side),
      "training block side must be a power of two in [4, 64]");
    const auto voxels = vxpc::voxelize(cloud->cloud, depth);
    std::vector<vxpc::VoxelBlock> blocks;
    for (auto& lb : vxpc::extractBlocks(voxels, depth, block_side))
      blocks.push_back(std::move(lb.block));
    VXPC_REQUIRE(!blocks.empty(), "no occupied blocks to train on");
    VXPC_REQUIRE(epochs >= 0 && batch_size >= 1, "invalid epochs or batch size");

    auto net = model->model.network()->cast<double>();
    vxpc::TrainingConfig cfg;
    cfg.epochs = epochs;
    cfg.batchSize = batch_size;
    cfg.seed = seed;
    const auto history = vxpc::train(net, blocks, cfg);
    if (epoch_bits)
      for (size_t i = 0; i < history.epochMeanBits.size(); i++)
        epoch_bits[i] = history.epochMeanBits[i];
    model->model = vxpc::OccupancyModel::neural(net.cast<float>());
  });
}

void
vxpc_model_free(vxpc_model* model)
{
  delete model;
}

//============================================================================

vxpc_status
vxpc_encode(
  const vxpc_cloud* cloud, const vxpc_encode_options* options,
  const vxpc_model* model, vxpc_buffer** container, vxpc_report** report)
{
  return guarded([&] {
    VXPC_REQUIRE(cloud && options && model && container, "null argument");
    *container = nullptr;
    if (report)
      *report = nullptr;
    vxpc::EncodeOptions opt;
    opt.depth = options->depth;
    opt.maxLevel = options->max_level;
    opt.threads = options->threads;
    auto result = vxpc::encodePointCloud(cloud->cloud, opt, model->model);

    auto buf = std::make_unique<vxpc_buffer>();
    buf->bytes = result.container;
    std::unique_ptr<vxpc_report> rep;
    if (report) {
      rep = std::make_unique<vxpc_report>();
      rep->result = std::move(result);
    }
    *container = buf.release();
    if (report)
      *report = rep.release();
  });
}

vxpc_status
vxpc_decode(
  const uint8_t* data, size_t size, const vxpc_model* weights, int threads,
  vxpc_cloud** out)
{
  return guarded([&] {
    VXPC_REQUIRE(out && (data || size == 0), "null argument");
    *out = nullptr;
    const auto decoded = vxpc::decodeContainer(
      std::span<const uint8_t>(data, size), weights ? &weights->model : nullptr,
      threads);
    auto c = std::make_unique<vxpc_cloud>();
    c->cloud = vxpc::toPointCloud(decoded.voxels);
    *out = c.release();
  });
}

vxpc_status
vxpc_buffer_load(const char* path, vxpc_buffer** out)
{
  return guarded([&] {
    VXPC_REQUIRE(path && out, "null argument");
    *out = nullptr;
    auto b = std::make_unique<vxpc_buffer>();
    b->bytes = vxpc::readFileBytes(path);
    *out = b.release();
  });
}

vxpc_status
vxpc_buffer_save(const vxpc_buffer* buffer, const char* path)
{
  return guarded([&] {
    VXPC_REQUIRE(buffer && path, "null argument");
    vxpc::writeFileBytes(path, buffer->bytes);
  });
}

const uint8_t*
vxpc_buffer_data(const vxpc_buffer* buffer)
{
  return buffer ? buffer->bytes.data() : nullptr;
}

size_t
vxpc_buffer_size(const vxpc_buffer* buffer)
{
  return buffer ? buffer->bytes.size() : 0;
}

void
vxpc_buffer_free(vxpc_buffer* buffer)
{
  delete buffer;
}

//============================================================================

size_t
vxpc_report_block_count(const vxpc_report* report)
{
  return report ? report->result.blocks.size() : 0;
}

vxpc_status
vxpc_report_block(const vxpc_report* report, size_t index, vxpc_block_stats* out)
{
  return guarded([&] {
    VXPC_REQUIRE(report && out, "null argument");
    VXPC_REQUIRE(index < report->result.blocks.size(), "block index out of range");
    const auto& b = report->result.blocks[index];
    out->origin[0] = b.location.origin.x;
    out->origin[1] = b.location.origin.y;
    out->origin[2] = b.location.origin.z;
    out->occupied_voxels = b.occupiedVoxels;
    out->leaves = b.leafCount;
    out->coded_voxels = b.codedVoxels;
    out->flags = b.flagCount;
    out->flag_bytes = b.flagBytes;
    out->payload_bytes = b.payloadBytes;
    out->total_bytes = b.totalBytes();
  });
}

void
vxpc_report_summary(const vxpc_report* report, vxpc_summary* out)
{
  if (!report || !out)
    return;
  const auto& r = report->result;
  *out = {};
  out->container_bytes = r.container.size();
  out->header_bytes = vxpc::kContainerHeaderBytes + 4 + 4 * r.blocks.size();
  out->octree_bytes = r.octreeBytes;
  for (const auto& b : r.blocks) {
    out->flag_bytes += b.flagBytes;
    out->payload_bytes += b.payloadBytes;
    out->coded_voxels += b.codedVoxels;
  }
  out->occupied_voxels = r.occupiedVoxels;
  out->blocks = r.blocks.size();
  out->bpov = r.occupiedVoxels ? vxpc::bpov(r.totalBits(), r.occupiedVoxels) : 0;
  out->seconds = r.seconds;
}

void
vxpc_report_free(vxpc_report* report)
{
  delete report;
}

}  // extern "C"
