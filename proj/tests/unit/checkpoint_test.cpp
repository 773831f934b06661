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

#include "pega/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "pega/errors.hpp"

namespace pega {
namespace {

namespace fs = std::filesystem;

Checkpoint sample(std::mt19937_64& rng) {
  Checkpoint c;
  c.set("stage", "user");
  c.set("note", "tab\tand unicode \xc3\xa9");
  c.users = IdMap({"alice", "bob"});
  c.items = IdMap({"x", "y", "z"});
  const EmbeddingTable base = EmbeddingTable::normal(2, 3, 4, 1.0, rng);
  const EmbeddingTable fin = EmbeddingTable::normal(2, 3, 4, 1.0, rng);
  put_embeddings(c, base, fin);
  put_aggregator(c, testing::random_params(rng, 4, 5, 2));
  return c;
}

TEST(Checkpoint, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  const Checkpoint c = sample(rng);
  const fs::path p = testing::scratch_dir("ckpt_roundtrip") / "a.bin";
  save_checkpoint(p, c);
  const Checkpoint back = load_checkpoint(p);
  EXPECT_EQ(back, c);
  EXPECT_EQ(get_embeddings(back, "final", 4), get_embeddings(c, "final", 4));
  EXPECT_EQ(back.get("note"), c.get("note"));

  const fs::path q = p.parent_path() / "b.bin";
  save_checkpoint(q, back);
  std::ifstream a(p, std::ios::binary), b(q, std::ios::binary);
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}),
            std::string(std::istreambuf_iterator<char>(b), {}));
}

TEST(Checkpoint, TruncationAndBitFlipsAreCorruption) {
  std::mt19937_64 rng(2);
  const fs::path dir = testing::scratch_dir("ckpt_corrupt");
  const fs::path p = dir / "full.bin";
  save_checkpoint(p, sample(rng));
  std::ifstream in(p, std::ios::binary);
  const std::string bytes(std::istreambuf_iterator<char>(in), {});
  for (std::size_t keep : {std::size_t(0), std::size_t(7), bytes.size() / 2, bytes.size() - 1}) {
    const fs::path cut = dir / "cut.bin";
    std::ofstream(cut, std::ios::binary) << bytes.substr(0, keep);
    EXPECT_THROW(load_checkpoint(cut), CorruptionError) << keep;
  }
  std::string flipped = bytes;
  flipped[flipped.size() - 20] ^= 0x10;
  const fs::path f = dir / "flip.bin";
  std::ofstream(f, std::ios::binary) << flipped;
  EXPECT_THROW(load_checkpoint(f), CorruptionError);
  EXPECT_THROW(load_checkpoint(dir / "absent.bin"), MissingArtifactError);
}

TEST(Checkpoint, WrongDimensionIsShapeError) {
  std::mt19937_64 rng(3);
  const Checkpoint c = sample(rng);
  EXPECT_THROW(get_embeddings(c, "final", 8), ShapeError);
  EXPECT_THROW(get_aggregator(c, 8), ShapeError);
  EXPECT_NO_THROW(get_aggregator(c, 4));
}

TEST(Checkpoint, MissingKeysAndBlocks) {
  Checkpoint c;
  EXPECT_THROW(c.get("stage"), CorruptionError);
  EXPECT_THROW(c.block("users.final"), CorruptionError);
  const std::vector<double> v = {1.0, 2.0, 3.0};
  EXPECT_THROW(c.add_block("bad", 2, 2, v), ShapeError);
}

TEST(Checkpoint, IdMapsMustMatchStore) {
  std::mt19937_64 rng(4);
  const Checkpoint c = sample(rng);
  InteractionStore s;
  s.users = IdMap({"alice", "bob"});
  s.items = IdMap({"x", "y", "z"});
  s.sync_sizes();
  EXPECT_NO_THROW(check_id_maps(c, s));
  s.items.intern("w");
  EXPECT_THROW(check_id_maps(c, s), ShapeError);
}

}  // namespace
}  // namespace pega
