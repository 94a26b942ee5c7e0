#include <benchmark/benchmark.h>

#include <sstream>

#include "morphalign/corpus.hpp"
#include "morphalign/ibm1.hpp"
#include "morphalign/metrics.hpp"
#include "morphalign/synthetic.hpp"
#include "morphalign/tokenizers.hpp"

namespace ma = morphalign;

namespace {

// Built once; every benchmark reads the same toy language.
struct Toy {
  ma::WordCounts corpus;
  ma::CuratedDataset dataset;

  Toy() {
    const auto lang = ma::generate_synthetic_language({});
    std::istringstream text(lang.corpus);
    corpus = ma::count_words(text);
    std::istringstream f(lang.feature_lexicon);
    std::istringstream s(lang.segmentation_lexicon);
    dataset = ma::curate(ma::parse_segmentation_lexicon(s), ma::parse_feature_lexicon(f));
  }
};

const Toy& toy() {
  static const Toy instance;
  return instance;
}

ma::TrainConfig config(ma::TokenizerKind kind, std::size_t size) {
  ma::TrainConfig c;
  c.kind = kind;
  c.vocab_size = size;
  return c;
}

void BM_TrainBpe(benchmark::State& state) {
  const auto cfg = config(ma::TokenizerKind::kBpe, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ma::train_bpe(toy().corpus, cfg));
}
BENCHMARK(BM_TrainBpe)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_TrainWordPiece(benchmark::State& state) {
  const auto cfg = config(ma::TokenizerKind::kWordPiece, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ma::train_wordpiece(toy().corpus, cfg));
}
BENCHMARK(BM_TrainWordPiece)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_TrainUnigram(benchmark::State& state) {
  const auto cfg = config(ma::TokenizerKind::kUnigram, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ma::train_unigram(toy().corpus, cfg));
}
BENCHMARK(BM_TrainUnigram)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_SegmentUnigram(benchmark::State& state) {
  const auto model = ma::train_unigram(toy().corpus, config(ma::TokenizerKind::kUnigram, 400));
  std::size_t words = 0;
  for (auto _ : state) {
    for (const auto& e : toy().dataset.entries) benchmark::DoNotOptimize(ma::segment(model, e.form()));
    words += toy().dataset.entries.size();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(words));
}
BENCHMARK(BM_SegmentUnigram);

void BM_Ibm1Epoch(benchmark::State& state) {
  const auto model = ma::train_bpe(toy().corpus, config(ma::TokenizerKind::kBpe, 400));
  const auto corpus = ma::build_parallel_corpus(toy().dataset, model, ma::FeatureMode::kSplit);
  const auto init = ma::uniform_table(corpus.pairs);
  for (auto _ : state) benchmark::DoNotOptimize(ma::em_epoch(corpus.pairs, init));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * corpus.pairs.size()));
}
BENCHMARK(BM_Ibm1Epoch);

void BM_AlignmentScore(benchmark::State& state) {
  const auto model = ma::train_bpe(toy().corpus, config(ma::TokenizerKind::kBpe, 400));
  const auto corpus = ma::build_parallel_corpus(toy().dataset, model, ma::FeatureMode::kSplit);
  const auto table = ma::train_ibm1(corpus.pairs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ma::alignment_score(table, corpus, ma::AggregationKind::kMean, 0.01));
  }
}
BENCHMARK(BM_AlignmentScore);

}  // namespace

BENCHMARK_MAIN();
