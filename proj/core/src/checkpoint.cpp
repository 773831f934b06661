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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pega/errors.hpp"
#include "pega/text_io.hpp"

namespace pega {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'P', 'E', 'G', 'A', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  template <class T>
  void pod(T value) {
    const char* p = reinterpret_cast<const char*>(&value);
    buf_.append(p, sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    buf_.append(s);
  }
  void doubles(std::span<const double> v) {
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size_bytes());
  }
  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T pod() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::vector<double> doubles(std::uint64_t count) {
    if (count > (bytes_.size() - pos_) / sizeof(double)) fail();
    std::vector<double> v(count);
    std::memcpy(v.data(), bytes_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) fail();
  }
  [[noreturn]] static void fail() {
    throw CorruptionError("checkpoint payload is truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void write_ids(Writer& w, const IdMap& ids) {
  w.pod<std::uint64_t>(ids.size());
  for (const auto& name : ids.names()) w.str(name);
}

IdMap read_ids(Reader& r) {
  const auto n = r.pod<std::uint64_t>();
  std::vector<std::string> names;
  for (std::uint64_t i = 0; i < n; ++i) names.push_back(r.str());
  IdMap ids(std::move(names));
  if (ids.size() != n) throw CorruptionError("checkpoint id map repeats an id");
  return ids;
}

template <class M>
void put_matrix(Checkpoint& ckpt, const std::string& name, const M& m) {
  ckpt.add_block(name, m.rows(), m.cols(),
                 std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

template <class M>
void get_matrix(const Checkpoint& ckpt, const std::string& name, M& out) {
  const NamedBlock& b = ckpt.block(name);
  out.resize(b.rows, b.cols);
  std::copy(b.values.begin(), b.values.end(), out.data());
}

}  // namespace

void Checkpoint::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : manifest) {
    if (k == key) {
      v = value;
      return;
    }
  }
  manifest.emplace_back(key, value);
}

const std::string& Checkpoint::get(const std::string& key) const {
  for (const auto& [k, v] : manifest) {
    if (k == key) return v;
  }
  throw CorruptionError("checkpoint manifest lacks key '" + key + "'");
}

bool Checkpoint::has(const std::string& key) const {
  for (const auto& kv : manifest) {
    if (kv.first == key) return true;
  }
  return false;
}

void Checkpoint::add_block(std::string name, std::int64_t rows, std::int64_t cols,
                           std::span<const double> values) {
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != values.size()) {
    throw ShapeError("block '" + name + "' size does not match its shape");
  }
  blocks.push_back({std::move(name), rows, cols,
                    std::vector<double>(values.begin(), values.end())});
}

const NamedBlock& Checkpoint::block(const std::string& name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return b;
  }
  throw CorruptionError("checkpoint lacks block '" + name + "'");
}

bool Checkpoint::has_block(const std::string& name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return true;
  }
  return false;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  Writer w;
  w.pod<std::uint64_t>(ckpt.manifest.size());
  for (const auto& [k, v] : ckpt.manifest) {
    w.str(k);
    w.str(v);
  }
  write_ids(w, ckpt.users);
  write_ids(w, ckpt.items);
  write_ids(w, ckpt.groups);
  w.pod<std::uint64_t>(ckpt.blocks.size());
  for (const auto& b : ckpt.blocks) {
    w.str(b.name);
    w.pod<std::int64_t>(b.rows);
    w.pod<std::int64_t>(b.cols);
    w.doubles(b.values);
  }
  const std::string& payload = w.bytes();

  Writer frame;
  frame.pod<std::uint32_t>(kCheckpointVersion);
  frame.pod<std::uint64_t>(payload.size());

  std::ofstream out = open_output(path);
  out.write(kMagic, sizeof(kMagic));
  out.write(frame.bytes().data(), static_cast<std::streamsize>(frame.bytes().size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  const std::uint64_t sum = fnv1a(payload);
  out.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("checkpoint not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = sizeof(kMagic) + 4 + 8;
  if (bytes.size() < kHeader + 8 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CorruptionError(path.string() + " is not a checkpoint or is truncated");
  }
  Reader header(std::string_view(bytes).substr(sizeof(kMagic), 12));
  const auto version = header.pod<std::uint32_t>();
  const auto size = header.pod<std::uint64_t>();
  if (version != kCheckpointVersion) {
    throw CorruptionError("checkpoint format version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  if (bytes.size() != kHeader + size + 8) {
    throw CorruptionError(path.string() + " has the wrong length; truncated?");
  }
  const std::string_view payload = std::string_view(bytes).substr(kHeader, size);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + kHeader + size, sizeof(stored));
  if (stored != fnv1a(payload)) {
    throw CorruptionError(path.string() + " failed its checksum");
  }

  Reader r(payload);
  Checkpoint ckpt;
  const auto entries = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < entries; ++i) {
    std::string k = r.str();
    std::string v = r.str();
    ckpt.manifest.emplace_back(std::move(k), std::move(v));
  }
  ckpt.users = read_ids(r);
  ckpt.items = read_ids(r);
  ckpt.groups = read_ids(r);
  const auto nblocks = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < nblocks; ++i) {
    NamedBlock b;
    b.name = r.str();
    b.rows = r.pod<std::int64_t>();
    b.cols = r.pod<std::int64_t>();
    if (b.rows < 0 || b.cols < 0) throw CorruptionError("negative block shape");
    b.values = r.doubles(static_cast<std::uint64_t>(b.rows) *
                         static_cast<std::uint64_t>(b.cols));
    ckpt.blocks.push_back(std::move(b));
  }
  if (!r.done()) throw CorruptionError("trailing bytes in checkpoint payload");
  return ckpt;
}

void put_embeddings(Checkpoint& ckpt, const EmbeddingTable& base,
                    const EmbeddingTable& final_emb) {
  put_matrix(ckpt, "embeddings.base.users", base.users);
  put_matrix(ckpt, "embeddings.base.items", base.items);
  put_matrix(ckpt, "embeddings.final.users", final_emb.users);
  put_matrix(ckpt, "embeddings.final.items", final_emb.items);
}

EmbeddingTable get_embeddings(const Checkpoint& ckpt, const std::string& which,
                              int expected_dim) {
  EmbeddingTable emb;
  get_matrix(ckpt, "embeddings." + which + ".users", emb.users);
  get_matrix(ckpt, "embeddings." + which + ".items", emb.items);
  if (emb.users.cols() != emb.items.cols()) {
    throw CorruptionError("user and item embeddings disagree on dimension");
  }
  if (expected_dim > 0 && emb.dim() != expected_dim) {
    throw ShapeError("checkpoint embeddings have dimension " +
                     std::to_string(emb.dim()) + ", expected " +
                     std::to_string(expected_dim));
  }
  return emb;
}

void put_aggregator(Checkpoint& ckpt, const AggregatorParams& params) {
  ckpt.set("lambda", format_double(params.fine_tune.lambda));
  auto put = [&](const std::string& name, const auto& m) { put_matrix(ckpt, name, m); };
  put("projection.center", params.projection.center_weight);
  put("projection.offset_raw", params.projection.offset_weight_raw);
  put("attention.query", params.attention.query_weight);
  put("attention.key", params.attention.key_weight);
  put("attention.bias", params.attention.bias);
  for (std::size_t l = 0; l < params.attention.hidden_weights.size(); ++l) {
    const std::string idx = std::to_string(l + 1);
    put("attention.hidden" + idx + ".weight", params.attention.hidden_weights[l]);
    put("attention.hidden" + idx + ".bias", params.attention.hidden_biases[l]);
  }
  put("attention.output", params.attention.output);
  put("finetune.bilinear", params.fine_tune.bilinear);
}

AggregatorParams get_aggregator(const Checkpoint& ckpt, int expected_latent) {
  AggregatorParams p;
  get_matrix(ckpt, "projection.center", p.projection.center_weight);
  get_matrix(ckpt, "projection.offset_raw", p.projection.offset_weight_raw);
  get_matrix(ckpt, "attention.query", p.attention.query_weight);
  get_matrix(ckpt, "attention.key", p.attention.key_weight);
  get_matrix(ckpt, "attention.bias", p.attention.bias);
  for (int l = 1; ckpt.has_block("attention.hidden" + std::to_string(l) + ".weight"); ++l) {
    const std::string idx = std::to_string(l);
    Matrix w;
    Vector b;
    get_matrix(ckpt, "attention.hidden" + idx + ".weight", w);
    get_matrix(ckpt, "attention.hidden" + idx + ".bias", b);
    p.attention.hidden_weights.push_back(std::move(w));
    p.attention.hidden_biases.push_back(std::move(b));
  }
  get_matrix(ckpt, "attention.output", p.attention.output);
  get_matrix(ckpt, "finetune.bilinear", p.fine_tune.bilinear);
  p.fine_tune.lambda = parse_double(ckpt.get("lambda"), "checkpoint", 0);

  const int h = p.attention.hidden();
  const int d = p.latent();
  bool ok = p.projection.center_weight.rows() == kTraitDims &&
            p.projection.center_weight.cols() == kTraitDims &&
            p.projection.offset_weight_raw.rows() == kTraitDims &&
            p.projection.offset_weight_raw.cols() == kTraitDims &&
            p.attention.query_weight.rows() == h &&
            p.attention.query_weight.cols() == kQueryDims &&
            p.attention.key_weight.rows() == h &&
            p.attention.key_weight.cols() == kTraitDims &&
            p.attention.output.size() == h &&
            p.fine_tune.bilinear.cols() == d + kTraitDims;
  for (std::size_t l = 0; l < p.attention.hidden_weights.size(); ++l) {
    ok = ok && p.attention.hidden_weights[l].rows() == h &&
         p.attention.hidden_weights[l].cols() == h &&
         p.attention.hidden_biases[l].size() == h;
  }
  if (!ok) throw ShapeError("aggregator blocks in checkpoint have inconsistent shapes");
  if (expected_latent > 0 && d != expected_latent) {
    throw ShapeError("checkpoint aggregator has latent dimension " +
                     std::to_string(d) + ", expected " +
                     std::to_string(expected_latent));
  }
  return p;
}

void check_id_maps(const Checkpoint& ckpt, const InteractionStore& store) {
  if (!(ckpt.users == store.users) || !(ckpt.items == store.items) ||
      !(ckpt.groups == store.groups)) {
    throw ShapeError("checkpoint id maps do not match the loaded interactions");
  }
}

}  // namespace pega
