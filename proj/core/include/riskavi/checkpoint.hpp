#pragma once

// Binary checkpoint container. Layout (all integers and doubles little-endian):
//
//   magic        8 bytes  "RAVICKPT"
//   version      u32      currently 1
//   meta_len     u32      byte length of the metadata block
//   metadata     meta_len bytes of "key=value\n" lines, sorted by key
//   global_step  u64
//   n_dims       u32      number of layer widths (obs, hidden..., output)
//   dims         n_dims x u32
//   n_actions    u32
//   n_tau        u32
//   online       f64[P]   P = parameter count, row-major per layer (W then b)
//   target       f64[P]
//   opt_kind     u8       0 = sgd, 1 = adam
//   diminishing  u8
//   lr, beta1, beta2, epsilon, k_alpha   5 x f64
//   opt_t        u64
//   has_moments  u8       1 if m and v follow
//   m, v         f64[P] each, only when has_moments = 1
//   checksum     u64      FNV-1a over every preceding byte
//
// See docs/checkpoint_format.md for the rationale behind each field.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "riskavi/quantile_net.hpp"

namespace riskavi {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::uint64_t global_step = 0;
  NetworkParams online;
  NetworkParams target;
  OptimizerState optimizer;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws CorruptCheckpoint on any structural or checksum error.
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace riskavi
