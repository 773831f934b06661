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

#include "pega/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <sstream>

#include <spdlog/spdlog.h>

#include "pega/errors.hpp"
#include "pega/text_io.hpp"

namespace pega {
namespace {

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<GroupItem> excluded_pairs(const Split& split) {
  std::vector<GroupItem> out = split.train;
  out.insert(out.end(), split.validation.begin(), split.validation.end());
  return out;
}

std::string format_or_na(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("NA");
}

std::optional<double> safe_vip(double ours, double compared) {
  if (!(compared > 0.0)) return std::nullopt;
  return vip(ours, compared);
}

}  // namespace

fs::path stage_dir(const fs::path& run, std::string_view stage) {
  return run / std::string(stage);
}

fs::path group_stage(const fs::path& run, AggregationMode mode) {
  return run / ("group-" + std::string(mode_name(mode)));
}

fs::path eval_stage(const fs::path& run, AggregationMode mode) {
  return run / ("eval-" + std::string(mode_name(mode)));
}

void require_stage(const fs::path& run, std::string_view stage) {
  if (!fs::exists(run / std::string(stage) / "manifest.txt")) {
    throw MissingArtifactError("stage '" + std::string(stage) +
                               "' has not been run in " + run.string());
  }
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const KeyValues& entries) {
  std::ofstream out = open_output(dir / "manifest.txt");
  out << "artifact_version\t" << kArtifactVersion << '\n';
  out << "command\t" << command << '\n';
  for (const auto& [k, v] : entries) out << k << '\t' << escape_field(v) << '\n';
  out << "created\t" << utc_now() << '\n';
}

KeyValues read_manifest(const fs::path& dir) {
  KeyValues out;
  const fs::path path = dir / "manifest.txt";
  if (!fs::exists(path)) throw MissingArtifactError("no manifest in " + dir.string());
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(path.string(), n, "expected key<TAB>value");
    }
    out.emplace_back(std::string(line.substr(0, tab)),
                     unescape_field(line.substr(tab + 1)));
  });
  return out;
}

Personality extract_corpus(const ReviewCorpus& corpus, const Lexicon& lexicon) {
  Personality out;
  for (std::size_t u = 0; u < corpus.size(); ++u) {
    std::vector<Tokens> tokens;
    tokens.reserve(corpus.reviews[u].size());
    for (const auto& text : corpus.reviews[u]) tokens.push_back(tokenize(text));
    out.users.push_back(corpus.users[u]);
    out.traits.push_back(extract_personality(tokens, lexicon));
  }
  return out;
}

void write_personality(const fs::path& path, const Personality& personality) {
  std::ofstream out = open_output(path);
  for (std::size_t u = 0; u < personality.users.size(); ++u) {
    out << personality.users[u] << '\t';
    const TraitVector& p = personality.traits[u];
    for (int c = 0; c < kTraitDims; ++c) {
      if (c) out << ' ';
      out << format_double(p[c]);
    }
    out << '\n';
  }
}

Personality read_personality(const fs::path& path) {
  Personality out;
  const std::string source = path.string();
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto f = split(line, '\t');
    if (f.size() != 2) throw ParseError(source, n, "expected user<TAB>values");
    TraitVector p;
    int c = 0;
    for (std::string_view v : split(trim(f[1]), ' ')) {
      if (v.empty()) continue;
      if (c >= kTraitDims) throw ParseError(source, n, "more than 100 values");
      p[c++] = parse_double(v, source, n);
    }
    if (c != kTraitDims) throw ParseError(source, n, "expected 100 values");
    out.users.emplace_back(trim(f[0]));
    out.traits.push_back(p);
  });
  return out;
}

TraitTable align_traits(const IdMap& users, const Personality& personality) {
  TraitTable out(users.size(), TraitVector::Zero());
  for (std::size_t i = 0; i < personality.users.size(); ++i) {
    if (const auto u = users.find(personality.users[i])) out[*u] = personality.traits[i];
  }
  return out;
}

void write_split(const fs::path& dir, const InteractionStore& store,
                 const Split& split) {
  write_group_items(dir / "train.tsv", store, split.train);
  write_group_items(dir / "validation.tsv", store, split.validation);
  write_group_items(dir / "test.tsv", store, split.test);
}

Split read_split(const fs::path& dir, const InteractionStore& store) {
  Split split;
  split.train = read_group_item_pairs(dir / "train.tsv", store);
  split.validation = read_group_item_pairs(dir / "validation.tsv", store);
  split.test = read_group_item_pairs(dir / "test.tsv", store);
  return split;
}

RunData load_run(const fs::path& run) {
  require_stage(run, "extract");
  require_stage(run, "groups");
  require_stage(run, "split");
  RunData data;
  const fs::path groups = stage_dir(run, "groups");
  data.store = load_interactions(groups / "user_items.tsv", groups / "groups.tsv",
                                 groups / "group_items.tsv");
  data.traits = align_traits(
      data.store.users, read_personality(stage_dir(run, "extract") / "personality.tsv"));
  data.split = read_split(stage_dir(run, "split"), data.store);
  return data;
}

RunData prepare_run(InteractionStore store, const ReviewCorpus& reviews,
                    const Lexicon& lexicon, const RunConfig& config) {
  RunData data;
  data.store = std::move(store);
  const ReviewCorpus kept =
      filter_corpus(reviews, config.min_reviews, config.min_review_length);
  data.traits = align_traits(data.store.users, extract_corpus(kept, lexicon));
  data.split = split_interactions(data.store.group_item_pairs(), config.split);
  return data;
}

Checkpoint base_checkpoint(const InteractionStore& store, const RunConfig& config) {
  Checkpoint ckpt;
  ckpt.set("artifact_version", kArtifactVersion);
  for (const auto& [k, v] : config_entries(config)) ckpt.set("config." + k, v);
  ckpt.users = store.users;
  ckpt.items = store.items;
  ckpt.groups = store.groups;
  return ckpt;
}

void save_user_model(const fs::path& path, const InteractionStore& store,
                     const RunConfig& config, const Stage1Result& result) {
  Checkpoint ckpt = base_checkpoint(store, config);
  ckpt.set("stage", "user");
  put_embeddings(ckpt, result.base, result.propagated);
  save_checkpoint(path, ckpt);
}

EmbeddingTable load_user_model(const fs::path& path, const InteractionStore& store,
                               int expected_dim) {
  const Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.get("stage") != "user") {
    throw CorruptionError(path.string() + " is not a user-stage checkpoint");
  }
  check_id_maps(ckpt, store);
  return get_embeddings(ckpt, "final", expected_dim);
}

void save_group_model(const fs::path& path, const InteractionStore& store,
                      const RunConfig& config, AggregationMode mode,
                      const AggregatorParams& params) {
  Checkpoint ckpt = base_checkpoint(store, config);
  ckpt.set("stage", "group");
  ckpt.set("mode", std::string(mode_name(mode)));
  put_aggregator(ckpt, params);
  save_checkpoint(path, ckpt);
}

AggregatorParams load_group_model(const fs::path& path,
                                  const InteractionStore& store,
                                  int expected_latent, AggregationMode mode) {
  const Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.get("stage") != "group") {
    throw CorruptionError(path.string() + " is not a group-stage checkpoint");
  }
  if (ckpt.get("mode") != mode_name(mode)) {
    throw PreconditionError(path.string() + " was trained in mode " +
                            ckpt.get("mode") + ", not " +
                            std::string(mode_name(mode)));
  }
  check_id_maps(ckpt, store);
  return get_aggregator(ckpt, expected_latent);
}

void write_loss_history(const fs::path& path, const std::string& stage,
                        const std::vector<double>& losses) {
  std::ofstream out = open_output(path);
  for (std::size_t e = 0; e < losses.size(); ++e) {
    out << (e + 1) << '\t' << stage << '\t' << format_double(losses[e]) << '\n';
  }
}

std::vector<GroupView> group_views(const InteractionStore& store,
                                   const EmbeddingTable& embeddings,
                                   const TraitTable& traits) {
  std::vector<GroupView> views;
  views.reserve(store.num_groups());
  for (const auto& members : store.group_members) {
    views.push_back(make_group_view(members, embeddings, traits));
  }
  return views;
}

MetricReport evaluate_model(const RunData& run, const EmbeddingTable& embeddings,
                            const AggregatorParams& params, AggregationMode mode,
                            std::span<const int> ks) {
  const auto views = group_views(run.store, embeddings, run.traits);
  const GroupScorer scorer(params, mode);
  const auto excluded = excluded_pairs(run.split);
  return evaluate(
      run.store, run.split.test, excluded,
      [&](Index g) { return scorer.score_all(views[g], embeddings.items); }, ks);
}

MetricReport evaluate_baseline(const RunData& run, const EmbeddingTable& embeddings,
                               ScoreAggregation strategy, std::span<const int> ks) {
  const auto excluded = excluded_pairs(run.split);
  return evaluate(
      run.store, run.split.test, excluded,
      [&](Index g) {
        const auto& members = run.store.group_members[g];
        RowMatrix member_embs(static_cast<Eigen::Index>(members.size()), embeddings.dim());
        for (std::size_t m = 0; m < members.size(); ++m) {
          member_embs.row(static_cast<Eigen::Index>(m)) = embeddings.users.row(members[m]);
        }
        const Matrix scores = member_embs * embeddings.items.transpose();
        Vector out(scores.cols());
        for (Eigen::Index i = 0; i < scores.cols(); ++i) {
          const Vector col = scores.col(i);
          out[i] = score_aggregate(
              std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
              strategy);
        }
        return out;
      },
      ks);
}

std::string metric_header(std::span<const int> ks) {
  std::string out;
  for (int k : ks) out += (out.empty() ? "" : "\t") + ("N@" + std::to_string(k));
  for (int k : ks) out += "\tR@" + std::to_string(k);
  return out;
}

std::string metric_row(const MetricSummary& s) {
  std::string out;
  for (double v : s.ndcg) out += (out.empty() ? "" : "\t") + format_double(v);
  for (double v : s.recall) out += "\t" + format_double(v);
  return out;
}

void write_reports(const fs::path& dir, const std::string& method,
                   const MetricReport& model,
                   const std::map<std::string, MetricReport>& baselines) {
  const std::string header = metric_header(model.ks);
  {
    std::ofstream out = open_output(dir / "summary.tsv");
    out << "method\tgroups\t" << header;
    for (const auto& [name, r] : baselines) out << "\tVIP_vs_" << name;
    out << '\n';
    out << method << '\t' << model.overall.groups << '\t' << metric_row(model.overall);
    const bool has_n10 =
        std::find(model.ks.begin(), model.ks.end(), 10) != model.ks.end();
    for (const auto& [name, r] : baselines) {
      out << '\t'
          << format_or_na(has_n10 ? safe_vip(model.ndcg(10), r.ndcg(10)) : std::nullopt);
    }
    out << '\n';
    for (const auto& [name, r] : baselines) {
      out << name << '\t' << r.overall.groups << '\t' << metric_row(r.overall);
      for (std::size_t i = 0; i < baselines.size(); ++i) out << "\t-";
      out << '\n';
    }
  }
  {
    std::ofstream out = open_output(dir / "vip.tsv");
    out << "baseline\t" << header << '\n';
    for (const auto& [name, r] : baselines) {
      out << name;
      for (std::size_t j = 0; j < model.ks.size(); ++j) {
        out << '\t' << format_or_na(safe_vip(model.overall.ndcg[j], r.overall.ndcg[j]));
      }
      for (std::size_t j = 0; j < model.ks.size(); ++j) {
        out << '\t'
            << format_or_na(safe_vip(model.overall.recall[j], r.overall.recall[j]));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out = open_output(dir / "buckets.tsv");
    out << "bucket\tgroups\t" << header << '\n';
    for (std::string_view label : kBucketLabels) {
      const MetricSummary& s = model.buckets.at(std::string(label));
      out << label << '\t' << s.groups << '\t' << metric_row(s) << '\n';
    }
  }
  {
    std::ofstream out = open_output(dir / "per_group.tsv");
    out << "group\t" << header << '\n';
    for (const auto& g : model.per_group) {
      MetricSummary s;
      s.ndcg = g.ndcg;
      s.recall = g.recall;
      out << g.group << '\t' << metric_row(s) << '\n';
    }
  }
}

Experiment run_experiment(const RunData& run, const RunConfig& config,
                          std::span<const AggregationMode> modes) {
  Experiment ex;
  ex.user = train_stage1(run.store, config.train);
  spdlog::info("stage 1 done: loss {:.5f} -> {:.5f}",
               ex.user.loss_history.empty() ? 0.0 : ex.user.loss_history.front(),
               ex.user.loss_history.empty() ? 0.0 : ex.user.loss_history.back());
  std::vector<int> ks = config.ks;
  if (std::find(ks.begin(), ks.end(), 10) == ks.end()) ks.insert(ks.begin(), 10);

  GroupTrainData data;
  data.store = &run.store;
  data.embeddings = &ex.user.propagated;
  data.traits = &run.traits;
  data.train = run.split.train;
  data.validation = run.split.validation;
  for (AggregationMode mode : modes) {
    ModeResult r;
    r.mode = mode;
    r.training = train_stage2(data, config.train, mode);
    r.test = evaluate_model(run, ex.user.propagated, r.training.params, mode, ks);
    spdlog::info("mode {}: best epoch {}, test N@10 {:.4f}", mode_name(mode),
                 r.training.best_epoch, r.test.ndcg(10));
    ex.modes.push_back(std::move(r));
  }
  return ex;
}

std::vector<AblationRow> ablation_table(std::span<const ModeResult> modes,
                                        int iterations, std::uint64_t seed) {
  const ModeResult* full = nullptr;
  for (const auto& m : modes) {
    if (m.mode == AggregationMode::kFull) full = &m;
  }
  std::vector<AblationRow> rows;
  for (const auto& m : modes) {
    AblationRow row;
    row.mode = m.mode;
    row.ndcg10 = m.test.ndcg(10);
    row.recall10 = m.test.recall(10);
    if (full && &m != full) {
      const auto a = full->test.group_ndcg(10);
      const auto b = m.test.group_ndcg(10);
      row.p_vs_full = permutation_test(a, b, iterations, seed);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_ablation(std::span<const AblationRow> rows) {
  std::ostringstream out;
  out << "mode\tN@10\tR@10\tp_vs_full\n";
  for (const auto& r : rows) {
    out << mode_name(r.mode) << '\t' << format_double(r.ndcg10) << '\t'
        << format_double(r.recall10) << '\t' << format_or_na(r.p_vs_full) << '\n';
  }
  return out.str();
}

}  // namespace pega
