#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "framecrf/error.h"
#include "framecrf/eval.h"
#include "framecrf/pipeline.h"
#include "synth.h"
#include "test_support.h"

namespace {

using namespace framecrf;

const tools::SyntheticData& small_data() {
  static const tools::SyntheticData data = tools::generate_synthetic_corpus(200, 1);
  return data;
}

TrainOptions quick() {
  TrainOptions o;
  o.max_iter = 60;
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Pipeline, TrainsOneModelPerSeenLu) {
  const auto& d = small_data();
  TrainReport report;
  const auto reg = train_all(d.corpus, d.lexicon, FeatureConfig{}, quick(), 1, &report);
  EXPECT_EQ(reg.models.size(), report.instances_per_lu.size());
  for (const auto& [lu, model] : reg.models) {
    EXPECT_TRUE(d.lexicon.has_lu(lu));
    EXPECT_GT(report.instances_per_lu.at(lu), 0);
    EXPECT_EQ(model.labels, LabelSet::build(lu, d.lexicon));
  }
  EXPECT_EQ(reg.find("nope"), nullptr);
}

TEST(Pipeline, FitsItsOwnTrainingData) {
  const auto& d = small_data();
  const auto reg = train_all(d.corpus, d.lexicon, FeatureConfig{}, TrainOptions{});
  PredictionDiagnostics diag;
  const Corpus pred = predict_corpus(d.corpus, reg, 1, &diag);
  EXPECT_EQ(diag.sentences, d.corpus.sentence_count());
  EXPECT_EQ(diag.skipped_occurrences, 0u);
  const auto levels = evaluate_levels(d.corpus, pred);
  EXPECT_GT(levels.sc.fmeasure(), 0.99);
  EXPECT_GT(levels.sr.fmeasure(), 0.97);
}

TEST(Pipeline, PredictionsStayWithinLexicon) {
  const auto& d = small_data();
  const auto reg = train_all(d.corpus, d.lexicon, FeatureConfig{}, quick());
  const Corpus pred = predict_corpus(d.corpus, reg);
  EXPECT_NO_THROW(validate_corpus(pred));
  EXPECT_NO_THROW(validate_against_lexicon(pred, d.lexicon));
  for (const auto& doc : pred.documents)
    for (const auto& s : doc.sentences)
      for (const auto& inst : s.frames)
        if (inst.is_other()) {
          EXPECT_TRUE(inst.roles.empty());
        }
}

TEST(Pipeline, JobsDoNotChangeResults) {
  const auto& d = small_data();
  const auto a = train_all(d.corpus, d.lexicon, FeatureConfig{}, quick(), 1);
  const auto b = train_all(d.corpus, d.lexicon, FeatureConfig{}, quick(), 3);
  ASSERT_EQ(a.models.size(), b.models.size());
  for (const auto& [lu, m] : a.models) EXPECT_EQ(serialize_model(m), serialize_model(b.models.at(lu)));
  PredictionDiagnostics da, db;
  EXPECT_EQ(predict_corpus(d.corpus, a, 1, &da), predict_corpus(d.corpus, a, 4, &db));
  EXPECT_EQ(da, db);
}

TEST(Pipeline, UnknownLuOccurrencesAreSkipped) {
  const auto& d = small_data();
  auto reg = train_all(d.corpus, d.lexicon, FeatureConfig{}, quick());
  ASSERT_TRUE(reg.models.count("décider"));
  reg.models.erase("décider");
  PredictionDiagnostics diag;
  predict_corpus(d.corpus, reg, 1, &diag);
  EXPECT_GT(diag.skipped_occurrences, 0u);
  EXPECT_EQ(diag.skipped_lus.count("décider"), 1u);
}

TEST(Pipeline, RegistryRoundTrip) {
  const auto& d = small_data();
  const auto reg = train_all(d.corpus, d.lexicon, FeatureConfig{}, quick());
  const auto dir = support::temp_dir("registry");
  save_registry(reg, dir);
  const auto back = load_registry(dir);
  EXPECT_EQ(back.lexicon, reg.lexicon);
  EXPECT_EQ(back.config, reg.config);
  ASSERT_EQ(back.models.size(), reg.models.size());
  for (const auto& [lu, m] : reg.models) {
    EXPECT_EQ(serialize_model(back.models.at(lu)), serialize_model(m));
  }
  EXPECT_EQ(predict_corpus(d.corpus, back), predict_corpus(d.corpus, reg));

  const auto again = support::temp_dir("registry2");
  save_registry(back, again);
  for (const auto& [lu, m] : reg.models) {
    EXPECT_EQ(slurp(dir / model_file_name(lu)), slurp(again / model_file_name(lu)));
  }
}

TEST(Pipeline, LoadRejectsMissingDirectory) {
  EXPECT_THROW(load_registry(support::temp_dir("empty-registry")), Error);
}

TEST(Pipeline, ModelFileNamesAreSafeAndDistinct) {
  EXPECT_EQ(model_file_name("prendre conscience"), "prendre conscience.model.json");
  EXPECT_EQ(model_file_name("a/b"), "a%2Fb.model.json");
  EXPECT_NE(model_file_name("a/b"), model_file_name("a%2Fb"));
  EXPECT_EQ(model_file_name("a\\b").find('\\'), std::string::npos);
}

TEST(Pipeline, PredictToFileWritesCorpus) {
  const auto& d = small_data();
  const auto reg = train_all(d.corpus, d.lexicon, FeatureConfig{}, quick());
  const auto dir = support::temp_dir("predict-file");
  const auto diag = predict_corpus_to_file(d.corpus, reg, dir / "pred.jsonl");
  EXPECT_EQ(parse_corpus(dir / "pred.jsonl"), predict_corpus(d.corpus, reg));
  EXPECT_NE(diagnostics_to_json(diag).find("\"sentences\""), std::string::npos);
}

}  // namespace
