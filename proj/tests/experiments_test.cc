#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "framecrf/error.h"
#include "framecrf/experiments.h"
#include "synth.h"
#include "fixtures.h"
#include "oracles/oracles.h"
#include "test_support.h"

namespace {

using namespace framecrf;

using fixtures::doc_with;

TEST(Folds, IdenticalDocumentsSpreadOnePerFold) {
  Corpus c;
  for (int i = 0; i < 5; ++i) c.documents.push_back(doc_with("d" + std::to_string(i), {3, 1}));
  const auto plan = make_folds(c, 5);
  for (int f = 0; f < 5; ++f) EXPECT_EQ(plan.documents_in(f).size(), 1u);
  EXPECT_NEAR(plan.balance, 0.0, 1e-12);
}

TEST(Folds, TenDocumentFixtureWithinTwentyPercentPerFrame) {
  const Corpus c = fixtures::ten_documents();
  const int k = fixtures::kTenDocFolds;
  std::vector<std::vector<int>> profiles;
  for (const auto& d : c.documents) {
    std::vector<int> counts(2, 0);
    for (const auto& s : d.sentences)
      for (const auto& inst : s.frames) ++counts[inst.frame == "Deciding" ? 1 : 0];
    profiles.push_back(counts);
  }
  ASSERT_TRUE(oracle::balanced_assignment_exists(profiles, k, 0.2));

  const auto plan = make_folds(c, k);
  std::vector<std::map<std::string, int>> counts(k);
  std::map<std::string, int> totals;
  for (const auto& d : c.documents)
    for (const auto& s : d.sentences)
      for (const auto& inst : s.frames) {
        ++counts[plan.assignment.at(d.doc_id)][inst.frame];
        ++totals[inst.frame];
      }
  for (const auto& [frame, total] : totals) {
    const double ideal = static_cast<double>(total) / k;
    for (int f = 0; f < k; ++f) {
      EXPECT_LE(std::abs(counts[f][frame] - ideal), 0.2 * ideal) << frame << " fold " << f;
    }
  }
}

TEST(Folds, SameSeedSamePlanAndBytes) {
  const auto data = tools::generate_synthetic_corpus(300, 4);
  const auto a = make_folds(data.corpus, 5, 99);
  const auto b = make_folds(data.corpus, 5, 99);
  EXPECT_EQ(a, b);
  EXPECT_EQ(fold_plan_to_json(a), fold_plan_to_json(b));
  EXPECT_EQ(fold_plan_from_json(fold_plan_to_json(a)), a);
}

TEST(Folds, PlanPartitionsDocuments) {
  const auto data = tools::generate_synthetic_corpus(300, 4);
  const auto plan = make_folds(data.corpus, 4, 7);
  EXPECT_NO_THROW(check_fold_plan(plan, data.corpus));
  std::size_t docs = 0, instances = 0;
  for (int f = 0; f < 4; ++f) {
    const auto split = split_fold(data.corpus, plan, f);
    EXPECT_EQ(split.train.documents.size() + split.test.documents.size(),
              data.corpus.documents.size());
    EXPECT_FALSE(split.test.documents.empty());
    std::set<std::string> train_ids;
    for (const auto& d : split.train.documents) train_ids.insert(d.doc_id);
    for (const auto& d : split.test.documents) EXPECT_FALSE(train_ids.count(d.doc_id));
    docs += split.test.documents.size();
    instances += split.test.instance_count();
  }
  EXPECT_EQ(docs, data.corpus.documents.size());
  EXPECT_EQ(instances, data.corpus.instance_count());
}

TEST(Folds, RejectsBadRequestsAndPlans) {
  const Corpus c = fixtures::ten_documents();
  EXPECT_THROW(make_folds(c, 1), ConfigError);
  EXPECT_THROW(make_folds(c, 11), ConfigError);
  auto plan = make_folds(c, 2);
  plan.assignment.erase("doc3");
  EXPECT_THROW(check_fold_plan(plan, c), ValidationError);
  plan = make_folds(c, 2);
  plan.assignment["doc3"] = 2;
  EXPECT_THROW(check_fold_plan(plan, c), ValidationError);
  plan = make_folds(c, 2);
  plan.assignment["ghost"] = 0;
  EXPECT_THROW(check_fold_plan(plan, c), ValidationError);
}

TEST(Ablation, SevenRowsInOrder) {
  const auto rows = ablation_configs(FeatureConfig{});
  ASSERT_EQ(rows.size(), 7u);
  std::vector<std::string> names;
  for (const auto& r : rows) names.push_back(r.name);
  EXPECT_EQ(names, (std::vector<std::string>{"all", "-dep_path", "-pos", "-lin_dist", "-lemma",
                                             "-parent_lemma", "-dependency_parse"}));
  EXPECT_EQ(rows[0].features, FeatureConfig{});
  EXPECT_EQ(rows[6].features.families,
            (std::vector<FeatureFamily>{FeatureFamily::kLemma, FeatureFamily::kPos,
                                        FeatureFamily::kLinDist}));
  for (std::size_t i = 1; i < 6; ++i) EXPECT_EQ(rows[i].features.families.size(), 4u);
}

TEST(Ablation, UnknownRowIsRejected) {
  const auto data = tools::generate_synthetic_corpus(100, 1);
  const auto plan = make_folds(data.corpus, 2);
  EXPECT_THROW(run_ablation(data.corpus, data.lexicon, plan, ExperimentOptions{}, {"-shape"}),
               ConfigError);
}

TEST(Crossval, SmallRunIsDeterministicAndJobIndependent) {
  const auto data = tools::generate_synthetic_corpus(120, 2);
  const auto plan = make_folds(data.corpus, 3);
  ExperimentOptions opts;
  opts.train.max_iter = 40;
  const auto a = run_crossval(data.corpus, data.lexicon, plan, opts);
  opts.jobs = 3;
  const auto b = run_crossval(data.corpus, data.lexicon, plan, opts);
  ASSERT_EQ(a.per_fold.size(), 3u);
  for (int f = 0; f < 3; ++f) {
    EXPECT_EQ(a.per_fold[f].sr, b.per_fold[f].sr);
    EXPECT_EQ(a.per_fold[f].dc, b.per_fold[f].dc);
  }
  EXPECT_EQ(crossval_to_json(a), crossval_to_json(b));
  EXPECT_NE(crossval_to_text(a).find("SR"), std::string::npos);
}

TEST(Composition, SharedLusAndRestriction) {
  Corpus c;
  c.documents.push_back(doc_with("a1", {2, 1}, "A"));
  c.documents.push_back(doc_with("b1", {1, 0}, "B"));
  EXPECT_EQ(shared_lus(c), std::vector<std::string>{"découvrir"});
  const auto r = restrict_to_lus(c, shared_lus(c));
  EXPECT_EQ(r.instance_count(), 3u);
  const auto lex = restrict_lexicon(support::small_lexicon(), shared_lus(c));
  EXPECT_TRUE(lex.has_lu("découvrir"));
  EXPECT_FALSE(lex.has_lu("décider"));
  EXPECT_TRUE(lex.has_frame("Deciding"));
}

TEST(Composition, RejectsBadSpecs) {
  const auto data = tools::generate_synthetic_corpus(200, 3);
  CompositionSetup setup{tools::kSourceA};
  ExperimentOptions opts;
  auto expect_config_error = [&](std::vector<CompositionSpec> specs, CompositionSetup s) {
    EXPECT_THROW(run_composition(data.corpus, data.lexicon, specs, s, opts), ConfigError);
  };
  expect_config_error({{"empty", {}}}, setup);
  expect_config_error({{"x", {{"NOPE", 1.0}}}}, setup);
  expect_config_error({{"x", {{tools::kSourceB, 0.0}}}}, setup);
  expect_config_error({{"x", {{tools::kSourceB, 1.5}}}}, setup);
  expect_config_error({{"x", {{tools::kSourceB, 0.5}, {tools::kSourceB, 0.5}}}}, setup);
  CompositionSetup bad = setup;
  bad.test_source = "NOPE";
  expect_config_error({{"x", {{tools::kSourceB, 1.0}}}}, bad);
}

TEST(Composition, TrainSizesMatchSelection) {
  const auto data = tools::generate_synthetic_corpus(200, 3);
  CompositionSetup setup{tools::kSourceA};
  setup.k = 3;
  ExperimentOptions opts;
  opts.train.max_iter = 30;
  opts.jobs = 4;
  const std::vector<CompositionSpec> specs{
      {"other source", {{tools::kSourceB, 1.0}}},
      {"same source", {{tools::kSourceA, 1.0}}},
  };
  const auto rows = run_composition(data.corpus, data.lexicon, specs, setup, opts);
  ASSERT_EQ(rows.size(), 2u);

  const auto filtered = restrict_to_lus(data.corpus, shared_lus(data.corpus));
  Corpus a, b;
  for (const auto& d : filtered.documents) (d.source == tools::kSourceA ? a : b).documents.push_back(d);
  const auto plan = make_folds(a, 3, setup.seed);
  for (int f = 0; f < 3; ++f) {
    EXPECT_EQ(rows[0].train_sizes[f], b.instance_count());
    EXPECT_EQ(rows[1].train_sizes[f], split_fold(a, plan, f).train.instance_count());
  }
  EXPECT_EQ(rows[1].sr_per_fold.size(), 3u);
  // The in-source row is plain cross-validation on that source.
  const auto cv = run_crossval(a, restrict_lexicon(data.lexicon, shared_lus(data.corpus)), plan, opts);
  for (int f = 0; f < 3; ++f) EXPECT_EQ(rows[1].sr_per_fold[f], cv.per_fold[f].sr);
  EXPECT_NE(composition_to_text(rows).find("same source"), std::string::npos);
}

TEST(Composition, PlanFromJson) {
  const auto plan = composition_plan_from_json(R"({
    "test_source": "WGM", "k": 4,
    "rows": [{"name": "mix", "parts": [{"source": "CTGM", "fraction": 1.0},
                                        {"source": "WGM", "fraction": 0.1}]}]})");
  EXPECT_EQ(plan.setup.test_source, "WGM");
  EXPECT_EQ(plan.setup.k, 4);
  EXPECT_TRUE(plan.setup.lu_filter);
  EXPECT_EQ(plan.setup.seed, kDefaultSeed);
  ASSERT_EQ(plan.specs.size(), 1u);
  EXPECT_DOUBLE_EQ(plan.specs[0].parts[1].fraction, 0.1);
  EXPECT_THROW(composition_plan_from_json(R"({"rows": []})"), ValidationError);
  EXPECT_THROW(composition_plan_from_json(
                   R"({"test_source": "A", "rows": [{"name": "x", "parts": [{"source": "A", "fraction": "1"}]}]})"),
               ValidationError);
}

}  // namespace
