// Copyright 2026 The PEGA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary model checkpoints.
//
// Layout: "PEGACKPT", u32 format version, u64 payload size, payload, u64
// FNV-1a of the payload. The payload holds a key/value manifest, the three id
// maps and a list of named double blocks. Integers are little-endian.

#ifndef PEGA_CHECKPOINT_HPP_
#define PEGA_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pega/aggregator.hpp"
#include "pega/gcn.hpp"
#include "pega/interactions.hpp"

namespace pega {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedBlock {
  std::string name;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> values;  // storage order of the source matrix

  bool operator==(const NamedBlock&) const = default;
};

struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> manifest;
  IdMap users;
  IdMap items;
  IdMap groups;
  std::vector<NamedBlock> blocks;

  void set(const std::string& key, const std::string& value);
  /// Throws CorruptionError when absent.
  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;

  void add_block(std::string name, std::int64_t rows, std::int64_t cols,
                 std::span<const double> values);
  /// Throws CorruptionError when absent.
  const NamedBlock& block(const std::string& name) const;
  bool has_block(const std::string& name) const;

  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws MissingArtifactError if the file does not exist and CorruptionError
/// on bad magic, unknown version, truncation or checksum mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Stage-one blocks: embeddings.{base,final}.{users,items}.
void put_embeddings(Checkpoint& ckpt, const EmbeddingTable& base,
                    const EmbeddingTable& final_emb);
/// `which` is "base" or "final". Throws ShapeError when `expected_dim` > 0
/// and differs from the stored dimension.
EmbeddingTable get_embeddings(const Checkpoint& ckpt, const std::string& which,
                              int expected_dim = 0);

void put_aggregator(Checkpoint& ckpt, const AggregatorParams& params);
/// Shapes are recovered from the stored blocks. Throws ShapeError when
/// `expected_latent` > 0 and differs.
AggregatorParams get_aggregator(const Checkpoint& ckpt, int expected_latent = 0);

/// Throws ShapeError if the stored id maps differ from the store's.
void check_id_maps(const Checkpoint& ckpt, const InteractionStore& store);

}  // namespace pega

#endif  // PEGA_CHECKPOINT_HPP_
