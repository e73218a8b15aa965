/*
 * vxpc: lossless voxelized point-cloud geometry codec.
 *
 * C interface over opaque handles. Every fallible call returns a
 * vxpc_status; on failure, vxpc_last_error() describes the most recent
 * error on the calling thread. Handles returned through out-parameters are
 * owned by the caller and released with the matching *_free function.
 */
#ifndef VXPC_VXPC_H
#define VXPC_VXPC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(VXPC_BUILDING_LIBRARY)
#define VXPC_API __declspec(dllexport)
#else
#define VXPC_API __declspec(dllimport)
#endif
#elif defined(__GNUC__) || defined(__clang__)
#define VXPC_API __attribute__((visibility("default")))
#else
#define VXPC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum vxpc_status {
  VXPC_OK = 0,
  VXPC_ERR_ARGUMENT = 1,
  VXPC_ERR_IO = 2,
  VXPC_ERR_FORMAT = 3,
  VXPC_ERR_INTERNAL = 4
} vxpc_status;

typedef enum vxpc_model_kind {
  VXPC_MODEL_UNIFORM = 0,
  VXPC_MODEL_ADAPTIVE = 1,
  VXPC_MODEL_VOXELDNN = 2
} vxpc_model_kind;

typedef enum vxpc_shape {
  VXPC_SHAPE_SPHERE = 0,
  VXPC_SHAPE_PLANE = 1,
  VXPC_SHAPE_RANDOM = 2
} vxpc_shape;

typedef enum vxpc_architecture {
  VXPC_ARCH_REFERENCE = 0,
  VXPC_ARCH_TINY = 1
} vxpc_architecture;

typedef struct vxpc_cloud vxpc_cloud;
typedef struct vxpc_model vxpc_model;
typedef struct vxpc_buffer vxpc_buffer;
typedef struct vxpc_report vxpc_report;

VXPC_API const char* vxpc_version(void);
VXPC_API const char* vxpc_last_error(void);

/* ---- point clouds ------------------------------------------------------ */

VXPC_API vxpc_status vxpc_cloud_load_ply(const char* path, vxpc_cloud** out);
/* xyz holds 3 * count doubles. */
VXPC_API vxpc_status
vxpc_cloud_from_points(const double* xyz, size_t count, vxpc_cloud** out);
VXPC_API vxpc_status vxpc_cloud_save_ply(
  const vxpc_cloud* cloud, const char* path, int binary);
VXPC_API size_t vxpc_cloud_size(const vxpc_cloud* cloud);
/* Pointer to 3 * size doubles, valid until the cloud is freed. */
VXPC_API const double* vxpc_cloud_points(const vxpc_cloud* cloud);
/* Number of distinct voxels after quantizing onto a 2^depth grid. */
VXPC_API vxpc_status
vxpc_cloud_voxel_count(const vxpc_cloud* cloud, int depth, size_t* out);
VXPC_API void vxpc_cloud_free(vxpc_cloud* cloud);

VXPC_API vxpc_status vxpc_synthesize(
  vxpc_shape shape, int depth, size_t count, uint64_t seed, vxpc_cloud** out);
/* VXPC_SEED from the environment when set, else `fallback`. */
VXPC_API uint64_t vxpc_default_seed(uint64_t fallback);

/* ---- occupancy models -------------------------------------------------- */

/* weights_path is required for VXPC_MODEL_VOXELDNN and ignored otherwise. */
VXPC_API vxpc_status vxpc_model_create(
  vxpc_model_kind kind, const char* weights_path, vxpc_model** out);
/* Freshly initialized network with deterministic random weights. */
VXPC_API vxpc_status vxpc_model_create_random(
  vxpc_architecture arch, uint64_t seed, vxpc_model** out);
VXPC_API vxpc_model_kind vxpc_model_get_kind(const vxpc_model* model);
VXPC_API size_t vxpc_model_parameter_count(const vxpc_model* model);
VXPC_API uint64_t vxpc_model_checksum(const vxpc_model* model);
VXPC_API vxpc_status vxpc_model_save(const vxpc_model* model, const char* path);
/*
 * Trains a neural model on the occupied blocks of side block_side cut from
 * the cloud (quantized at `depth`). epoch_bits, when non-null, receives up
 * to `epochs` mean cross-entropy values in bits per block.
 */
VXPC_API vxpc_status vxpc_model_train(
  vxpc_model* model, const vxpc_cloud* cloud, int depth, int block_side,
  int epochs, int batch_size, uint64_t seed, double* epoch_bits);
VXPC_API void vxpc_model_free(vxpc_model* model);

/* ---- coding ------------------------------------------------------------ */

typedef struct vxpc_encode_options {
  int depth;     /* grid bit depth, >= 6 */
  int max_level; /* 1 (64^3 blocks only) .. 5 (down to 4^3) */
  int threads;   /* worker cap; 1 for sequential */
} vxpc_encode_options;

VXPC_API vxpc_status vxpc_encode(
  const vxpc_cloud* cloud, const vxpc_encode_options* options,
  const vxpc_model* model, vxpc_buffer** container, vxpc_report** report);

/* `weights` may be null unless the container was coded with voxeldnn. */
VXPC_API vxpc_status vxpc_decode(
  const uint8_t* data, size_t size, const vxpc_model* weights, int threads,
  vxpc_cloud** out);

VXPC_API vxpc_status vxpc_buffer_load(const char* path, vxpc_buffer** out);
VXPC_API vxpc_status vxpc_buffer_save(const vxpc_buffer* buffer, const char* path);
VXPC_API const uint8_t* vxpc_buffer_data(const vxpc_buffer* buffer);
VXPC_API size_t vxpc_buffer_size(const vxpc_buffer* buffer);
VXPC_API void vxpc_buffer_free(vxpc_buffer* buffer);

/* ---- reports ----------------------------------------------------------- */

typedef struct vxpc_block_stats {
  int32_t origin[3];
  uint64_t occupied_voxels;
  uint64_t leaves;
  uint64_t coded_voxels; /* volume of all coded leaves */
  uint64_t flags;
  uint64_t flag_bytes;
  uint64_t payload_bytes;
  uint64_t total_bytes;
} vxpc_block_stats;

typedef struct vxpc_summary {
  uint64_t container_bytes;
  uint64_t header_bytes; /* header, octree length and codeword length prefixes */
  uint64_t octree_bytes;
  uint64_t flag_bytes;
  uint64_t payload_bytes;
  uint64_t occupied_voxels;
  uint64_t coded_voxels;
  uint64_t blocks;
  double bpov;
  double seconds;
} vxpc_summary;

VXPC_API size_t vxpc_report_block_count(const vxpc_report* report);
VXPC_API vxpc_status vxpc_report_block(
  const vxpc_report* report, size_t index, vxpc_block_stats* out);
VXPC_API void vxpc_report_summary(const vxpc_report* report, vxpc_summary* out);
VXPC_API void vxpc_report_free(vxpc_report* report);

#ifdef __cplusplus
}
#endif

#endif /* VXPC_VXPC_H */
