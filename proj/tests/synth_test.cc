#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "framecrf/error.h"
#include "framecrf/features.h"
#include "framecrf/tagging.h"
#include "synth.h"
#include "test_support.h"

namespace {

using namespace framecrf;

std::string bytes(const Corpus& c) {
  std::ostringstream out;
  write_corpus(c, out);
  return out.str();
}

TEST(Synth, SameSeedSameBytes) {
  EXPECT_EQ(bytes(tools::generate_synthetic_corpus(10, 5).corpus),
            bytes(tools::generate_synthetic_corpus(10, 5).corpus));
  EXPECT_NE(bytes(tools::generate_synthetic_corpus(50, 5).corpus),
            bytes(tools::generate_synthetic_corpus(50, 6).corpus));
}

TEST(Synth, CorpusIsValidAndCoversBothSources) {
  const auto d = tools::generate_synthetic_corpus(400, 20170626);
  EXPECT_EQ(d.corpus.sentence_count(), 400u);
  EXPECT_NO_THROW(validate_corpus(d.corpus));
  EXPECT_NO_THROW(validate_against_lexicon(d.corpus, d.lexicon));
  std::set<std::string> sources, lus, frames;
  for (const auto& doc : d.corpus.documents) {
    sources.insert(doc.source);
    for (const auto& s : doc.sentences)
      for (const auto& inst : s.frames) {
        lus.insert(inst.lu);
        frames.insert(inst.frame);
      }
  }
  EXPECT_EQ(sources, (std::set<std::string>{tools::kSourceA, tools::kSourceB}));
  EXPECT_GE(lus.size(), 3u);
  EXPECT_TRUE(frames.count("OTHER"));
  EXPECT_TRUE(frames.count("Hostile_encounter"));
  EXPECT_TRUE(frames.count("Quarreling"));
}

TEST(Synth, GoldInstancesMatchLexiconOccurrences) {
  const auto d = tools::generate_synthetic_corpus(200, 8);
  for (const auto& doc : d.corpus.documents)
    for (const auto& s : doc.sentences) {
      std::set<std::vector<int>> gold;
      for (const auto& inst : s.frames) gold.insert(inst.target);
      std::set<std::vector<int>> found;
      for (const auto& occ : iter_lu_occurrences(s, d.lexicon)) found.insert(occ.target);
      EXPECT_EQ(gold, found) << doc.doc_id << " " << s.sent_id;
    }
}

TEST(Synth, QuestionMapCoversEveryFrameElement) {
  const auto lex = tools::synthetic_lexicon();
  const auto q = tools::synthetic_questions();
  for (const auto& [frame, fes] : lex.frame_to_fes())
    for (const auto& fe : fes) EXPECT_NE(q.question_of(frame, fe), "other") << frame << "/" << fe;
}

TEST(Synth, WritesLoadableFiles) {
  const auto d = tools::generate_synthetic_corpus(30, 1);
  const auto dir = support::temp_dir("synth");
  tools::write_synthetic(d, dir);
  EXPECT_EQ(parse_corpus(dir / "corpus.jsonl"), d.corpus);
  EXPECT_EQ(parse_lexicon(dir / "lexicon.json"), d.lexicon);
  EXPECT_EQ(parse_question_map(dir / "questions.tsv").to_tsv(), d.questions.to_tsv());
}

// Ceiling check: a lookup table keyed by the gold frame and a token's feature
// window recovers every gold label, so roles are decidable from the feature
// families alone.
TEST(Synth, FeatureLookupOracleRecoversEveryInstance) {
  const auto d = tools::generate_synthetic_corpus(600, 12);
  const FeatureConfig config;
  std::map<std::string, LabelSet> labels;
  for (const auto& [lu, frames] : d.lexicon.lu_to_frames()) labels.emplace(lu, LabelSet::build(lu, d.lexicon));

  using Key = std::pair<std::string, std::vector<std::string>>;
  std::map<std::string, std::map<Key, std::set<LabelId>>> table;
  auto keys = [&](const Sentence& s, const FrameInstance& inst) {
    std::vector<Key> out;
    for (auto& window : feature_strings(s, inst.target, config)) out.push_back({inst.frame, window});
    return out;
  };
  for (const auto& doc : d.corpus.documents)
    for (const auto& s : doc.sentences)
      for (const auto& inst : s.frames) {
        const auto y = encode_labels(s, inst, labels.at(inst.lu));
        const auto k = keys(s, inst);
        for (std::size_t t = 0; t < k.size(); ++t) table[inst.lu][k[t]].insert(y[t]);
      }
  std::size_t conflicts = 0;
  for (const auto& [lu, entries] : table)
    for (const auto& [key, seen] : entries) conflicts += seen.size() > 1;
  EXPECT_EQ(conflicts, 0u);

  Corpus predicted = d.corpus;
  for (auto& doc : predicted.documents)
    for (auto& s : doc.sentences)
      for (auto& inst : s.frames) {
        const auto k = keys(s, inst);
        LabelSequence y;
        for (const auto& key : k) y.push_back(*table[inst.lu][key].begin());
        inst = decode_labels(y, inst.target, labels.at(inst.lu));
      }
  const auto levels = evaluate_levels(d.corpus, predicted);
  EXPECT_DOUBLE_EQ(levels.sr.fmeasure(), 1.0);
  EXPECT_DOUBLE_EQ(levels.sc.fmeasure(), 1.0);
}

TEST(Synth, TooFewSentencesRejected) {
  EXPECT_THROW(tools::generate_synthetic_corpus(9, 1), ConfigError);
}

}  // namespace
