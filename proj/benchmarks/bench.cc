#include <benchmark/benchmark.h>

#include <random>

#include "framecrf/crf.h"
#include "framecrf/features.h"
#include "framecrf/pipeline.h"
#include "synth.h"

namespace {

using namespace framecrf;

struct Problem {
  CrfWeights w;
  FeatureVector x;
};

// Dense-ish random model: `length` positions with 15 active features each.
Problem random_problem(int length, int labels, int features) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Problem p{CrfWeights(features, labels), {}};
  for (double& v : p.w.params()) v = u(rng);
  for (int t = 0; t < length; ++t) {
    std::vector<FeatureId> ids;
    for (int k = 0; k < 15; ++k) ids.push_back(static_cast<FeatureId>(rng() % features));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    p.x.positions.push_back(std::move(ids));
  }
  return p;
}

void BM_ForwardBackward(benchmark::State& state) {
  const auto p = random_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 5000);
  for (auto _ : state) benchmark::DoNotOptimize(log_partition_and_marginals(p.w, p.x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Args({30, 17})->Args({60, 17})->Args({30, 41});

void BM_Viterbi(benchmark::State& state) {
  const auto p = random_problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 5000);
  for (auto _ : state) benchmark::DoNotOptimize(viterbi_decode(p.w, p.x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Viterbi)->Args({30, 17})->Args({60, 17})->Args({30, 41});

const tools::SyntheticData& corpus() {
  static const auto data = tools::generate_synthetic_corpus(400, 1);
  return data;
}

void BM_FeatureExtraction(benchmark::State& state) {
  const auto& data = corpus();
  FeatureDictionary dict;
  std::size_t tokens = 0;
  for (auto _ : state) {
    for (const auto& doc : data.corpus.documents)
      for (const auto& s : doc.sentences)
        for (const auto& inst : s.frames) {
          benchmark::DoNotOptimize(extract_sequence_features(s, inst.target, FeatureConfig{}, dict));
          tokens += s.tokens.size();
        }
  }
  state.SetItemsProcessed(static_cast<int64_t>(tokens));
}
BENCHMARK(BM_FeatureExtraction)->Unit(benchmark::kMillisecond);

void BM_TrainAll(benchmark::State& state) {
  const auto& data = corpus();
  TrainOptions options;
  options.max_iter = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_all(data.corpus, data.lexicon, FeatureConfig{}, options));
  }
}
BENCHMARK(BM_TrainAll)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_PredictCorpus(benchmark::State& state) {
  const auto& data = corpus();
  const auto registry = train_all(data.corpus, data.lexicon, FeatureConfig{}, TrainOptions{});
  for (auto _ : state) benchmark::DoNotOptimize(predict_corpus(data.corpus, registry));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data.corpus.sentence_count()));
}
BENCHMARK(BM_PredictCorpus)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
