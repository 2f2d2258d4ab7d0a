#pragma once

// Checkpoint container. Little-endian binary:
//
//   "WGPNNCKP"  u32 version  u64 seed  u64 epoch  u64 adam_step
//   u32 num_entities  u32 num_predicates  u64 embedding_dim  u64 hidden_dim  u64 pseudo_points
//   u32 metadata_count  { u32 len, key bytes, u32 len, value bytes }*
//   u32 tensor_count    { u32 len, name bytes, u64 rows, u64 cols, f64[rows*cols] column-major }*
//
// Tensors are the model blocks by name followed by the Adam moments under
// "adam.m/<name>" and "adam.v/<name>".

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "wgpnn/train.hpp"

namespace wgpnn {

struct Checkpoint {
  TrainerState state;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wgpnn
