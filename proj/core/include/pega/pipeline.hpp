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

// File-staged pipeline shared by the command-line tool and the experiment
// harnesses. A run directory holds one subdirectory per stage, each with a
// manifest.txt:
//
//   extract/   personality.tsv, lexicon.tsv
//   groups/    user_items.tsv, groups.tsv, group_items.tsv
//   split/     train.tsv, validation.tsv, test.tsv
//   user/      checkpoint.bin, loss.tsv
//   group-<mode>/  checkpoint.bin, loss.tsv
//   eval-<mode>/   summary.tsv, vip.tsv, buckets.tsv, per_group.tsv
//   ablate/    table.tsv
//   explain-<mode>/ weights.jsonl

#ifndef PEGA_PIPELINE_HPP_
#define PEGA_PIPELINE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pega/aggregator.hpp"
#include "pega/checkpoint.hpp"
#include "pega/config.hpp"
#include "pega/datasets.hpp"
#include "pega/eval.hpp"
#include "pega/lexicon.hpp"
#include "pega/trainer.hpp"

namespace pega {

inline constexpr const char* kArtifactVersion = "0.1.0";

namespace fs = std::filesystem;

fs::path stage_dir(const fs::path& run, std::string_view stage);
fs::path group_stage(const fs::path& run, AggregationMode mode);
fs::path eval_stage(const fs::path& run, AggregationMode mode);

/// Throws MissingArtifactError naming `stage` unless its manifest exists.
void require_stage(const fs::path& run, std::string_view stage);

/// Writes dir/manifest.txt: version, command, the entries, then a creation
/// timestamp.
void write_manifest(const fs::path& dir, const std::string& command,
                    const KeyValues& entries);
KeyValues read_manifest(const fs::path& dir);

struct Personality {
  std::vector<std::string> users;
  TraitTable traits;  // parallel to users
};

/// Personality of every user in an already filtered corpus.
Personality extract_corpus(const ReviewCorpus& corpus, const Lexicon& lexicon);

/// `user<TAB>100 space-separated decimals`.
void write_personality(const fs::path& path, const Personality& personality);
Personality read_personality(const fs::path& path);

/// Trait row per store user; users without reviews get the zero vector.
TraitTable align_traits(const IdMap& users, const Personality& personality);

void write_split(const fs::path& dir, const InteractionStore& store,
                 const Split& split);
Split read_split(const fs::path& dir, const InteractionStore& store);

/// Everything the training and evaluation stages consume.
struct RunData {
  InteractionStore store;
  TraitTable traits;
  Split split;
};

/// Loads the extract, groups and split stages.
RunData load_run(const fs::path& run);

/// In-memory equivalent of extract + split for a dataset already in memory.
RunData prepare_run(InteractionStore store, const ReviewCorpus& reviews,
                    const Lexicon& lexicon, const RunConfig& config);

/// Checkpoint pre-filled with the store's id maps and the config snapshot.
Checkpoint base_checkpoint(const InteractionStore& store, const RunConfig& config);

void save_user_model(const fs::path& path, const InteractionStore& store,
                     const RunConfig& config, const Stage1Result& result);
/// Propagated embeddings. Throws ShapeError on a dimension or id mismatch.
EmbeddingTable load_user_model(const fs::path& path, const InteractionStore& store,
                               int expected_dim);

void save_group_model(const fs::path& path, const InteractionStore& store,
                      const RunConfig& config, AggregationMode mode,
                      const AggregatorParams& params);
AggregatorParams load_group_model(const fs::path& path,
                                  const InteractionStore& store,
                                  int expected_latent, AggregationMode mode);

/// `epoch<TAB>stage<TAB>loss`.
void write_loss_history(const fs::path& path, const std::string& stage,
                        const std::vector<double>& losses);

std::vector<GroupView> group_views(const InteractionStore& store,
                                   const EmbeddingTable& embeddings,
                                   const TraitTable& traits);

/// Test-set report for the aggregator under `mode`. Train and validation
/// pairs are excluded from the candidates.
MetricReport evaluate_model(const RunData& run, const EmbeddingTable& embeddings,
                            const AggregatorParams& params, AggregationMode mode,
                            std::span<const int> ks);

/// Test-set report for a score-aggregation baseline over member scores.
MetricReport evaluate_baseline(const RunData& run, const EmbeddingTable& embeddings,
                               ScoreAggregation strategy, std::span<const int> ks);

std::string metric_header(std::span<const int> ks);
std::string metric_row(const MetricSummary& summary);

/// summary.tsv, vip.tsv, buckets.tsv and per_group.tsv.
void write_reports(const fs::path& dir, const std::string& method,
                   const MetricReport& model,
                   const std::map<std::string, MetricReport>& baselines);

struct ModeResult {
  AggregationMode mode = AggregationMode::kFull;
  Stage2Result training;
  MetricReport test;
};

struct Experiment {
  Stage1Result user;
  std::vector<ModeResult> modes;
};

/// Stage one once, then stage two and test evaluation per mode.
Experiment run_experiment(const RunData& run, const RunConfig& config,
                          std::span<const AggregationMode> modes);

struct AblationRow {
  AggregationMode mode = AggregationMode::kFull;
  double ndcg10 = 0.0;
  double recall10 = 0.0;
  std::optional<double> p_vs_full;  // permutation test on per-group N@10
};

/// One row per mode; p-values compare each variant with the full model.
std::vector<AblationRow> ablation_table(std::span<const ModeResult> modes,
                                        int iterations, std::uint64_t seed);
std::string format_ablation(std::span<const AblationRow> rows);

}  // namespace pega

#endif  // PEGA_PIPELINE_HPP_
