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

#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>

#include "pega/aggregator.hpp"
#include "pega/eval.hpp"
#include "pega/gcn.hpp"
#include "pega/lexicon.hpp"
#include "pega/pipeline.hpp"
#include "pega/synth.hpp"

namespace pega {
namespace {

const Lexicon& lexicon() {
  static const Lexicon lex =
      parse_lexicon(std::filesystem::path(PEGA_SOURCE_DIR) / "data/lexicon/test_lexicon.tsv");
  return lex;
}

const SynthData& synth() {
  static const SynthData data = [] {
    SynthSpec spec;
    spec.seed = 1;
    return synthesize(spec, lexicon());
  }();
  return data;
}

void BM_Propagate(benchmark::State& state) {
  const InteractionStore& store = synth().store;
  const LightGraph graph(store, 3);
  std::mt19937_64 rng(1);
  const EmbeddingTable base = EmbeddingTable::normal(
      store.num_users(), store.num_items(), int(state.range(0)), 0.1, rng);
  for (auto _ : state) benchmark::DoNotOptimize(graph.propagate(base));
  state.SetItemsProcessed(state.iterations() * std::int64_t(store.user_item_count()));
}
BENCHMARK(BM_Propagate)->Arg(64)->Arg(256);

void BM_Extract(benchmark::State& state) {
  std::vector<Tokens> reviews;
  for (const auto& text : synth().reviews.reviews.front()) reviews.push_back(tokenize(text));
  for (auto _ : state) benchmark::DoNotOptimize(extract_personality(reviews, lexicon()));
}
BENCHMARK(BM_Extract);

void BM_GroupScoreAll(benchmark::State& state) {
  const int d = int(state.range(0));
  const InteractionStore& store = synth().store;
  std::mt19937_64 rng(2);
  const EmbeddingTable emb =
      EmbeddingTable::normal(store.num_users(), store.num_items(), d, 0.1, rng);
  TraitTable traits(store.num_users(), TraitVector::Zero());
  for (auto& t : traits) t = TraitVector::Random().cwiseAbs() * 0.01;
  const auto views = group_views(store, emb, traits);
  const AggregatorParams params = AggregatorParams::random(d, kDefaultHidden, 2, 0.3, rng);
  const GroupScorer scorer(params, AggregationMode::kFull);
  std::size_t g = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scorer.score_all(views[g], emb.items));
    g = (g + 1) % views.size();
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(store.num_items()));
}
BENCHMARK(BM_GroupScoreAll)->Arg(64)->Arg(256);

void BM_RankAndMetrics(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise;
  const std::size_t n = std::size_t(state.range(0));
  std::vector<double> scores(n);
  for (auto& s : scores) s = noise(rng);
  std::vector<Index> candidates(n);
  for (std::size_t i = 0; i < n; ++i) candidates[i] = Index(i);
  const std::vector<Index> relevant = {3, 17, 42};
  for (auto _ : state) {
    const RankedList r = rank_items(scores, candidates);
    benchmark::DoNotOptimize(ndcg_at_k(r, relevant, 10) + recall_at_k(r, relevant, 50));
  }
}
BENCHMARK(BM_RankAndMetrics)->Arg(200)->Arg(5000);

void BM_PermutationTest(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  std::vector<double> a(300), b(300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(permutation_test(a, b, 10000, 1));
}
BENCHMARK(BM_PermutationTest);

}  // namespace
}  // namespace pega

BENCHMARK_MAIN();
