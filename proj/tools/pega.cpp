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

// pega: personality-enhanced group recommendation pipeline.
//
//   pega synth        --out DIR --lexicon FILE
//   pega extract      --run RUN --reviews FILE --lexicon FILE
//   pega build-groups --run RUN --source given|cocheckin|similarity|random ...
//   pega split        --run RUN
//   pega train-user   --run RUN
//   pega train-group  --run RUN --mode full
//   pega train        --run RUN --mode full
//   pega evaluate     --run RUN --mode full --baseline AVG,LM,MAX
//   pega ablate       --run RUN
//   pega explain      --run RUN --mode full
//
// Exit codes: 0 success, 2 usage, 3 input format, 4 numeric failure,
// 5 missing upstream stage.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pega/checkpoint.hpp"
#include "pega/config.hpp"
#include "pega/datasets.hpp"
#include "pega/errors.hpp"
#include "pega/eval.hpp"
#include "pega/lexicon.hpp"
#include "pega/pipeline.hpp"
#include "pega/synth.hpp"
#include "pega/text_io.hpp"
#include "pega/trainer.hpp"

namespace fs = std::filesystem;
using namespace pega;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInput = 3, kNumeric = 4, kMissing = 5 };

// Flags shared by every training-aware command; unset flags leave the
// config-file or default value alone.
struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> latent_dim;
  std::optional<int> layers;
  std::optional<int> gcn_layers;
  std::optional<double> lambda;
  std::optional<double> lr;
  std::optional<double> dropout;
  std::optional<int> negatives;
  std::optional<int> epochs;
  std::optional<int> user_epochs;
  std::optional<int> group_epochs;
  std::optional<int> batch_size;
  std::optional<int> patience;
  std::string ks;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "training seed");
    app->add_option("--latent-dim", latent_dim, "embedding dimension d");
    app->add_option("--layers", layers, "attention MLP layers L");
    app->add_option("--gcn-layers", gcn_layers, "graph propagation layers");
    app->add_option("--lambda", lambda, "preference balance coefficient");
    app->add_option("--lr", lr, "Adam learning rate");
    app->add_option("--dropout", dropout, "attention dropout rate");
    app->add_option("--negatives", negatives, "negatives per positive");
    app->add_option("--epochs", epochs, "epochs for both stages");
    app->add_option("--user-epochs", user_epochs, "stage-one epochs");
    app->add_option("--group-epochs", group_epochs, "stage-two epochs");
    app->add_option("--batch-size", batch_size, "instances per Adam step");
    app->add_option("--patience", patience, "early-stop patience, 0 disables");
    app->add_option("--k", ks, "ranking cutoffs, e.g. 10,20,50");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_path.empty()) apply_config_file(c, config_path);
    if (seed) c.train.seed = *seed;
    if (latent_dim) c.train.latent_dim = *latent_dim;
    if (layers) c.train.attention_layers = *layers;
    if (gcn_layers) c.train.gcn_layers = *gcn_layers;
    if (lambda) c.train.lambda = *lambda;
    if (lr) c.train.learning_rate = *lr;
    if (dropout) c.train.dropout = *dropout;
    if (negatives) c.train.negatives = *negatives;
    if (epochs) c.train.user_epochs = c.train.group_epochs = *epochs;
    if (user_epochs) c.train.user_epochs = *user_epochs;
    if (group_epochs) c.train.group_epochs = *group_epochs;
    if (batch_size) c.train.batch_size = *batch_size;
    if (patience) c.train.patience = *patience;
    if (!ks.empty()) c.ks = parse_int_list(ks);
    validate(c);
    return c;
  }
};

KeyValues with(KeyValues base, const KeyValues& more) {
  base.insert(base.end(), more.begin(), more.end());
  return base;
}

std::string count(std::size_t n) { return std::to_string(n); }

// ---------------------------------------------------------------- synth

struct SynthCmd {
  std::string out, lexicon;
  SynthSpec spec;

  void attach(CLI::App* app) {
    app->add_option("--out", out, "output directory")->required();
    app->add_option("--lexicon", lexicon, "lexicon file")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--users", spec.users);
    app->add_option("--items", spec.items);
    app->add_option("--groups", spec.groups);
    app->add_option("--dominance", spec.dominance, "share of dominant-driven groups");
    app->add_option("--clusters", spec.clusters);
    app->add_option("--assertive-share", spec.assertive_share);
    app->add_option("--consensus-outsider", spec.consensus_outsider);
    app->add_option("--enthusiast-share", spec.enthusiast_share);
    app->add_option("--items-per-user", spec.items_per_user);
    app->add_option("--min-group-size", spec.min_group_size);
    app->add_option("--max-group-size", spec.max_group_size);
    app->add_option("--min-group-items", spec.min_group_items);
    app->add_option("--max-group-items", spec.max_group_items);
    app->add_option("--seed", spec.seed);
  }

  int run() const {
    const Lexicon lex = parse_lexicon(fs::path(lexicon));
    const SynthData data = synthesize(spec, lex);
    write_synth(out, data);
    std::size_t dominant = 0;
    for (const auto& l : data.labels) dominant += l.dominant ? 1 : 0;
    write_manifest(out, "synth",
                   {{"lexicon_digest", file_digest(lexicon)},
                    {"users", count(spec.users)},
                    {"items", count(spec.items)},
                    {"groups", count(spec.groups)},
                    {"dominance", format_double(spec.dominance)},
                    {"clusters", count(spec.clusters)},
                    {"assertive_share", format_double(spec.assertive_share)},
                    {"consensus_outsider", format_double(spec.consensus_outsider)},
                    {"enthusiast_share", format_double(spec.enthusiast_share)},
                    {"seed", std::to_string(spec.seed)},
                    {"dominant_groups", count(dominant)},
                    {"consensus_groups", count(data.labels.size() - dominant)}});
    spdlog::info("wrote {} users, {} groups ({} dominant) to {}", spec.users,
                 spec.groups, dominant, out);
    return kOk;
  }
};

// ---------------------------------------------------------------- extract

struct ExtractCmd {
  std::string run_dir, reviews, lexicon;
  ConfigFlags flags;
  std::optional<std::size_t> min_reviews, min_length;

  void attach(CLI::App* app) {
    app->add_option("--run", run_dir, "run directory")->required();
    app->add_option("--reviews", reviews, "user<TAB>review file")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--lexicon", lexicon, "lexicon file")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--min-reviews", min_reviews, "qualifying reviews per user");
    app->add_option("--min-length", min_length, "characters per qualifying review");
    app->add_option("--config", flags.config_path)->check(CLI::ExistingFile);
  }

  int run() const {
    RunConfig config = flags.resolve();
    if (min_reviews) config.min_reviews = *min_reviews;
    if (min_length) config.min_review_length = *min_length;
    const Lexicon lex = parse_lexicon(fs::path(lexicon));
    const ReviewCorpus corpus = read_reviews(reviews);
    const ReviewCorpus kept =
        filter_corpus(corpus, config.min_reviews, config.min_review_length);
    const Personality p = extract_corpus(kept, lex);
    const fs::path dir = stage_dir(run_dir, "extract");
    write_personality(dir / "personality.tsv", p);
    fs::copy_file(lexicon, dir / "lexicon.tsv", fs::copy_options::overwrite_existing);
    write_manifest(dir, "extract",
                   {{"reviews", reviews},
                    {"reviews_digest", file_digest(reviews)},
                    {"lexicon", lexicon},
                    {"lexicon_digest", file_digest(lexicon)},
                    {"min_reviews", count(config.min_reviews)},
                    {"min_review_length", count(config.min_review_length)},
                    {"log_base", "e"},
                    {"tf", "relative"},
                    {"input_users", count(corpus.size())},
                    {"retained_users", count(kept.size())}});
    spdlog::info("extracted {} of {} users", kept.size(), corpus.size());
    return kOk;
  }
};

// ---------------------------------------------------------------- build-groups

struct BuildGroupsCmd {
  std::string run_dir, source = "given", user_items, groups, group_items;
  std::string checkins, friends;
  bool no_friends = false;
  std::int64_t window = 900;
  double threshold = 0.27;
  std::size_t num_groups = 100;
  std::optional<double> size_mean;
  std::size_t size_max = 20;
  std::uint64_t seed = 42;

  void attach(CLI::App* app) {
    app->add_option("--run", run_dir, "run directory")->required();
    app->add_option("--source", source, "given, cocheckin, similarity or random")
        ->check(CLI::IsMember({"given", "cocheckin", "similarity", "random"}));
    app->add_option("--user-items", user_items, "user<TAB>item file")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--groups", groups, "group<TAB>members file (given)");
    app->add_option("--group-items", group_items, "group<TAB>item file (given)");
    app->add_option("--checkins", checkins, "user<TAB>item<TAB>time[<TAB>rating]");
    app->add_option("--friends", friends, "user<TAB>user file");
    app->add_flag("--no-friends", no_friends, "co-check-in without friendship data");
    app->add_option("--window", window, "co-check-in window in seconds");
    app->add_option("--threshold", threshold, "PCC threshold");
    app->add_option("--num-groups", num_groups);
    app->add_option("--size-mean", size_mean, "mean group size");
    app->add_option("--size-max", size_max);
    app->add_option("--seed", seed);
  }

  int run() const {
    InteractionStore store;
    KeyValues extra{{"source", source}, {"user_items_digest", file_digest(user_items)}};
    if (source == "given") {
      if (groups.empty() || group_items.empty()) {
        throw PreconditionError("--source given needs --groups and --group-items");
      }
      store = load_interactions(user_items, groups, group_items);
      extra.emplace_back("groups_digest", file_digest(groups));
      extra.emplace_back("group_items_digest", file_digest(group_items));
    } else {
      if (checkins.empty()) throw PreconditionError("--source " + source + " needs --checkins");
      store = load_interactions(user_items, {}, {});
      const auto records = read_checkins(checkins);
      extra.emplace_back("checkins_digest", file_digest(checkins));
      GroupSet built;
      if (source == "cocheckin") {
        CocheckinOptions opt;
        opt.window = window;
        opt.require_friends = !no_friends;
        FriendGraph graph;
        if (opt.require_friends) {
          if (friends.empty()) {
            throw PreconditionError("co-check-in needs --friends or --no-friends");
          }
          graph = read_friends(friends);
          extra.emplace_back("friends_digest", file_digest(friends));
        }
        built = build_cocheckin_groups(records, graph, opt);
        extra.emplace_back("window", std::to_string(window));
        extra.emplace_back("require_friends", opt.require_friends ? "true" : "false");
      } else if (source == "similarity") {
        SimilarityOptions opt;
        opt.threshold = threshold;
        opt.num_groups = num_groups;
        opt.size.mean = size_mean.value_or(5.5);
        opt.size.max = size_max;
        opt.seed = seed;
        built = build_similarity_groups(ratings_from_checkins(records), opt);
        extra.emplace_back("threshold", format_double(threshold));
        extra.emplace_back("size_mean", format_double(opt.size.mean));
      } else {
        RandomGroupOptions opt;
        opt.num_groups = num_groups;
        opt.size.mean = size_mean.value_or(9.0);
        opt.size.max = size_max;
        opt.seed = seed;
        built = build_random_groups(ratings_from_checkins(records), opt);
        extra.emplace_back("size_mean", format_double(opt.size.mean));
      }
      extra.emplace_back("seed", std::to_string(seed));
      add_groups(store, built);
      store.validate();
    }
    const fs::path dir = stage_dir(run_dir, "groups");
    write_user_items(dir / "user_items.tsv", store);
    write_groups(dir / "groups.tsv", store);
    write_group_items(dir / "group_items.tsv", store, store.group_item_pairs());

    std::size_t members = 0;
    for (const auto& m : store.group_members) members += m.size();
    const auto pairs = store.group_item_pairs();
    const double avg_size =
        store.num_groups() ? double(members) / double(store.num_groups()) : 0.0;
    write_manifest(dir, "build-groups",
                   with(extra, {{"users", count(store.num_users())},
                                {"items", count(store.num_items())},
                                {"groups", count(store.num_groups())},
                                {"avg_group_size", format_double(avg_size)},
                                {"user_item_interactions", count(store.user_item_count())},
                                {"group_item_interactions", count(pairs.size())}}));
    spdlog::info("{} groups, avg size {:.2f}, {} group-item interactions",
                 store.num_groups(), avg_size, pairs.size());
    return kOk;
  }
};

// ---------------------------------------------------------------- split

struct SplitCmd {
  std::string run_dir;
  ConfigFlags flags;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  int fold = -1;

  void attach(CLI::App* app) {
    app->add_option("--run", run_dir, "run directory")->required();
    app->add_option("--config", flags.config_path)->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "split seed");
    app->add_option("--folds", folds, "cross-validation fold count");
    app->add_option("--fold", fold, "use this fold as test (cross-validation)");
  }

  int run() const {
    RunConfig config = flags.resolve();
    if (seed) config.split.seed = *seed;
    if (folds) config.split.folds = *folds;
    require_stage(run_dir, "groups");
    const fs::path g = stage_dir(run_dir, "groups");
    const InteractionStore store =
        load_interactions(g / "user_items.tsv", g / "groups.tsv", g / "group_items.tsv");
    const auto pairs = store.group_item_pairs();
    const Split split = fold >= 0 ? fold_split(kfold(pairs, config.split), fold)
                                  : split_interactions(pairs, config.split);
    const fs::path dir = stage_dir(run_dir, "split");
    write_split(dir, store, split);
    write_manifest(dir, "split",
                   {{"split_train", format_double(config.split.train)},
                    {"split_validation", format_double(config.split.validation)},
                    {"split_test", format_double(config.split.test)},
                    {"split_seed", std::to_string(config.split.seed)},
                    {"folds", std::to_string(config.split.folds)},
                    {"fold", std::to_string(fold)},
                    {"train", count(split.train.size())},
                    {"validation", count(split.validation.size())},
                    {"test", count(split.test.size())}});
    spdlog::info("split {}/{}/{}", split.train.size(), split.validation.size(),
                 split.test.size());
    return kOk;
  }
};

// ---------------------------------------------------------------- training

int train_user(const fs::path& run_dir, const RunConfig& config) {
  const RunData data = load_run(run_dir);
  const Stage1Result result = train_stage1(data.store, config.train);
  const fs::path dir = stage_dir(run_dir, "user");
  save_user_model(dir / "checkpoint.bin", data.store, config, result);
  write_loss_history(dir / "loss.tsv", "user", result.loss_history);
  write_manifest(dir, "train-user", config_entries(config));
  if (!result.loss_history.empty()) {
    spdlog::info("stage 1: loss {:.5f} -> {:.5f}", result.loss_history.front(),
                 result.loss_history.back());
  }
  return kOk;
}

Stage2Result train_group(const fs::path& run_dir, const RunConfig& config,
                         AggregationMode mode) {
  const RunData data = load_run(run_dir);
  require_stage(run_dir, "user");
  const EmbeddingTable emb = load_user_model(stage_dir(run_dir, "user") / "checkpoint.bin",
                                             data.store, config.train.latent_dim);
  GroupTrainData train;
  train.store = &data.store;
  train.embeddings = &emb;
  train.traits = &data.traits;
  train.train = data.split.train;
  train.validation = data.split.validation;
  Stage2Result result = train_stage2(train, config.train, mode);
  const fs::path dir = group_stage(run_dir, mode);
  save_group_model(dir / "checkpoint.bin", data.store, config, mode, result.params);
  write_loss_history(dir / "loss.tsv", "group", result.loss_history);
  {
    std::ofstream out = open_output(dir / "validation.tsv");
    for (std::size_t e = 0; e < result.validation_ndcg.size(); ++e) {
      out << (e + 1) << "\tN@10\t" << format_double(result.validation_ndcg[e]) << '\n';
    }
  }
  write_manifest(dir, "train-group",
                 with(config_entries(config),
                      {{"mode", std::string(mode_name(mode))},
                       {"best_epoch", std::to_string(result.best_epoch)}}));
  if (!result.loss_history.empty()) {
    spdlog::info("stage 2 [{}]: loss {:.5f} -> {:.5f}, best epoch {}", mode_name(mode),
                 result.loss_history.front(), result.loss_history.back(),
                 result.best_epoch);
  }
  return result;
}

struct TrainCmd {
  std::string run_dir, mode = "full";
  ConfigFlags flags;
  bool user = true, group = true;

  void attach(CLI::App* app, bool with_mode) {
    app->add_option("--run", run_dir, "run directory")->required();
    if (with_mode) {
      app->add_option("--mode", mode, "full, nATT, nPRE or BASE")
          ->check(CLI::IsMember({"full", "PEGA", "nATT", "nPRE", "BASE"}));
    }
    flags.attach(app);
  }

  int run() const {
    const RunConfig config = flags.resolve();
    if (user) train_user(run_dir, config);
    if (group) train_group(run_dir, config, parse_mode(mode));
    return kOk;
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCmd {
  std::string run_dir, mode = "full", baselines = "AVG,LM,MAX";
  ConfigFlags flags;

  void attach(CLI::App* app) {
    app->add_option("--run", run_dir, "run directory")->required();
    app->add_option("--mode", mode, "full, nATT, nPRE or BASE")
        ->check(CLI::IsMember({"full", "PEGA", "nATT", "nPRE", "BASE"}));
    app->add_option("--baseline", baselines, "comma list of AVG, LM, MAX or none");
    flags.attach(app);
  }

  int run() const {
    const RunConfig config = flags.resolve();
    const AggregationMode m = parse_mode(mode);
    const RunData data = load_run(run_dir);
    require_stage(run_dir, "user");
    const std::string gstage = group_stage(run_dir, m).filename().string();
    require_stage(run_dir, gstage);
    const EmbeddingTable emb = load_user_model(stage_dir(run_dir, "user") / "checkpoint.bin",
                                               data.store, 0);
    const AggregatorParams params = load_group_model(
        group_stage(run_dir, m) / "checkpoint.bin", data.store, emb.dim(), m);
    const MetricReport report = evaluate_model(data, emb, params, m, config.ks);

    std::map<std::string, MetricReport> base;
    if (baselines != "none") {
      for (std::string_view name : split(baselines, ',')) {
        name = trim(name);
        if (name.empty()) continue;
        const ScoreAggregation s = parse_aggregation(name);
        base.emplace(std::string(aggregation_name(s)),
                     evaluate_baseline(data, emb, s, config.ks));
      }
    }
    const fs::path dir = eval_stage(run_dir, m);
    write_reports(dir, std::string(mode_name(m)), report, base);
    write_manifest(dir, "evaluate",
                   {{"mode", std::string(mode_name(m))},
                    {"ks", format_int_list(config.ks)},
                    {"baselines", baselines},
                    {"test_groups", count(report.overall.groups)}});
    std::ifstream summary(dir / "summary.tsv");
    std::cout << summary.rdbuf();
    return kOk;
  }
};

// ---------------------------------------------------------------- ablate

struct AblateCmd {
  std::string run_dir;
  ConfigFlags flags;
  std::optional<int> iterations;

  void attach(CLI::App* app) {
    app->add_option("--run", run_dir, "run directory")->required();
    app->add_option("--iterations", iterations, "permutation-test iterations");
    flags.attach(app);
  }

  int run() const {
    RunConfig config = flags.resolve();
    if (iterations) config.permutation_iterations = *iterations;
    const RunData data = load_run(run_dir);
    require_stage(run_dir, "user");
    const EmbeddingTable emb = load_user_model(stage_dir(run_dir, "user") / "checkpoint.bin",
                                               data.store, config.train.latent_dim);
    std::vector<int> ks = config.ks;
    if (std::find(ks.begin(), ks.end(), 10) == ks.end()) ks.insert(ks.begin(), 10);

    std::vector<ModeResult> results;
    for (AggregationMode m : {AggregationMode::kFull, AggregationMode::kNoAttention,
                              AggregationMode::kNoPreference, AggregationMode::kBase}) {
      ModeResult r;
      r.mode = m;
      r.training = train_group(run_dir, config, m);
      r.test = evaluate_model(data, emb, r.training.params, m, ks);
      results.push_back(std::move(r));
    }
    const auto rows =
        ablation_table(results, config.permutation_iterations, config.train.seed);
    const std::string table = format_ablation(rows);
    const fs::path dir = stage_dir(run_dir, "ablate");
    {
      std::ofstream out = open_output(dir / "table.tsv");
      out << table;
    }
    write_manifest(dir, "ablate",
                   with(config_entries(config),
                        {{"test_groups", count(results.front().test.overall.groups)}}));
    std::cout << table;
    return kOk;
  }
};

// ---------------------------------------------------------------- explain

struct ExplainCmd {
  std::string run_dir, mode = "full";
  std::vector<std::string> groups;
  std::string item;

  void attach(CLI::App* app) {
    app->add_option("--run", run_dir, "run directory")->required();
    app->add_option("--mode", mode, "full, nATT, nPRE or BASE")
        ->check(CLI::IsMember({"full", "PEGA", "nATT", "nPRE", "BASE"}));
    app->add_option("--group", groups, "restrict to these group ids");
    app->add_option("--item", item, "explain this item instead of the test items");
  }

  int run() const {
    const AggregationMode m = parse_mode(mode);
    const RunData data = load_run(run_dir);
    require_stage(run_dir, "user");
    require_stage(run_dir, group_stage(run_dir, m).filename().string());
    const Lexicon lex = parse_lexicon(stage_dir(run_dir, "extract") / "lexicon.tsv");
    const EmbeddingTable emb = load_user_model(stage_dir(run_dir, "user") / "checkpoint.bin",
                                               data.store, 0);
    const AggregatorParams params = load_group_model(
        group_stage(run_dir, m) / "checkpoint.bin", data.store, emb.dim(), m);
    const GroupScorer scorer(params, m);

    std::vector<GroupItem> targets;
    if (!item.empty()) {
      const Index i = data.store.items.at(item);
      for (std::size_t g = 0; g < data.store.num_groups(); ++g) {
        targets.push_back({static_cast<Index>(g), i});
      }
    } else {
      targets = data.split.test;
    }
    std::vector<Index> keep;
    for (const auto& id : groups) keep.push_back(data.store.groups.at(id));

    const fs::path dir = stage_dir(run_dir, "explain-" + std::string(mode_name(m)));
    std::ofstream out = open_output(dir / "weights.jsonl");
    std::size_t records = 0;
    static constexpr Trait kTraits[] = {Trait::kOpenness, Trait::kConscientiousness,
                                        Trait::kExtraversion, Trait::kAgreeableness,
                                        Trait::kNeuroticism};
    for (const GroupItem& t : targets) {
      if (!keep.empty() && std::find(keep.begin(), keep.end(), t.group) == keep.end()) {
        continue;
      }
      const GroupView view =
          make_group_view(data.store.group_members[t.group], emb, data.traits);
      const Vector v = emb.items.row(t.item).transpose();
      const GroupWeights w = scorer.weights(view, v);
      nlohmann::ordered_json rec;
      rec["group"] = data.store.groups.name(t.group);
      rec["item"] = data.store.items.name(t.item);
      rec["mode"] = std::string(mode_name(m));
      rec["score"] = scorer.score(view, v);
      nlohmann::ordered_json members = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k < view.size(); ++k) {
        nlohmann::ordered_json mem;
        mem["user"] = data.store.users.name(view.members[k]);
        mem["alpha"] = w.alpha.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(w.alpha[k]);
        mem["beta"] = w.beta.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(w.beta[k]);
        mem["gamma"] = w.gamma[k];
        nlohmann::ordered_json traits;
        for (Trait tr : kTraits) {
          traits[std::string(1, trait_tag(tr))] = {
              {"High", trait_level_sum(view.member_traits[k], lex, tr, Level::kHigh)},
              {"Low", trait_level_sum(view.member_traits[k], lex, tr, Level::kLow)}};
        }
        mem["traits"] = std::move(traits);
        members.push_back(std::move(mem));
      }
      rec["members"] = std::move(members);
      out << rec.dump() << '\n';
      ++records;
    }
    write_manifest(dir, "explain", {{"mode", std::string(mode_name(m))},
                                    {"records", count(records)}});
    if (records == 0) {
      spdlog::warn("no test items for the selected groups; pass --item to explain one");
    }
    spdlog::info("wrote {} explanation records", records);
    return kOk;
  }
};

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("pega");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  if (const char* level = std::getenv("PEGA_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Personality-enhanced group recommendation"};
  app.require_subcommand(1);

  SynthCmd synth;
  synth.attach(app.add_subcommand("synth", "generate a synthetic dataset"));
  ExtractCmd extract;
  extract.attach(app.add_subcommand("extract", "personality vectors from reviews"));
  BuildGroupsCmd build;
  build.attach(app.add_subcommand("build-groups", "assemble the interaction store"));
  SplitCmd split_cmd;
  split_cmd.attach(app.add_subcommand("split", "train/validation/test split"));
  TrainCmd train_user_cmd;
  train_user_cmd.group = false;
  train_user_cmd.attach(app.add_subcommand("train-user", "stage one"), false);
  TrainCmd train_group_cmd;
  train_group_cmd.user = false;
  train_group_cmd.attach(app.add_subcommand("train-group", "stage two"), true);
  TrainCmd train_cmd;
  train_cmd.attach(app.add_subcommand("train", "both stages"), true);
  EvaluateCmd evaluate_cmd;
  evaluate_cmd.attach(app.add_subcommand("evaluate", "test-set metrics"));
  AblateCmd ablate;
  ablate.attach(app.add_subcommand("ablate", "full, nATT, nPRE and BASE side by side"));
  ExplainCmd explain;
  explain.attach(app.add_subcommand("explain", "per-member weights as JSON lines"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "synth") return synth.run();
    if (name == "extract") return extract.run();
    if (name == "build-groups") return build.run();
    if (name == "split") return split_cmd.run();
    if (name == "train-user") return train_user_cmd.run();
    if (name == "train-group") return train_group_cmd.run();
    if (name == "train") return train_cmd.run();
    if (name == "evaluate") return evaluate_cmd.run();
    if (name == "ablate") return ablate.run();
    if (name == "explain") return explain.run();
  } catch (const MissingArtifactError& e) {
    spdlog::error("missing upstream stage: {}", e.what());
    return kMissing;
  } catch (const NumericError& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kNumeric;
  } catch (const PreconditionError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const StructuralError& e) {
    spdlog::error("structural error: {}", e.what());
    return kInput;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kInput;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kInput;
  }
  return kUsage;
}
