#include <gtest/gtest.h>

#include <random>

#include "framecrf/error.h"
#include "framecrf/tagging.h"
#include "test_support.h"

namespace {

using namespace framecrf;

FrameLexicon ambiguous_lexicon() {
  FrameLexicon lex;
  lex.add_frame("Hostile_encounter", {"Side_1", "Side_2", "Time"});
  lex.add_frame("Quarreling", {"Arguers", "Issue", "Time"});
  lex.add_lu("combattre", {"Hostile_encounter", "Quarreling"});
  return lex;
}

TEST(Tagging, LabelSetLayout) {
  const LabelSet labels = LabelSet::build("combattre", ambiguous_lexicon());
  // O, 3 frames x {T, TI}, 5 distinct FEs x {B, I}.
  EXPECT_EQ(labels.size(), 1 + 6 + 10);
  EXPECT_EQ(labels.label(0), "O");
  EXPECT_TRUE(std::is_sorted(labels.labels().begin() + 1, labels.labels().end()));
  EXPECT_GE(labels.find("T:OTHER"), 1);
  EXPECT_GE(labels.find("B-Time"), 1);
  EXPECT_EQ(labels.find("B-Decision"), -1);
  EXPECT_EQ(labels.info(labels.find("TI:Quarreling")).kind, LabelKind::kTargetInside);
  EXPECT_EQ(labels.info(labels.find("I-Issue")).name, "Issue");
  EXPECT_EQ(LabelSet::from_labels("combattre", labels.labels()), labels);
  EXPECT_THROW(LabelSet::from_labels("x", {"B-A", "O"}), EncodingError);
}

TEST(Tagging, EncodeExample) {
  const FrameLexicon lex = support::small_lexicon();
  const LabelSet labels = LabelSet::build("découvrir", lex);
  const Sentence s = support::discover_sentence();
  const auto y = encode_labels(s, support::discover_instance(), labels);
  std::vector<std::string> names;
  for (auto id : y) names.push_back(labels.label(id));
  EXPECT_EQ(names, (std::vector<std::string>{"B-Cognizer", "I-Cognizer", "T:Becoming_aware",
                                             "B-Phenomenon", "I-Phenomenon", "B-Place",
                                             "I-Place", "O"}));
}

TEST(Tagging, EncodeRejectsBadInstances) {
  const FrameLexicon lex = support::small_lexicon();
  const LabelSet labels = LabelSet::build("découvrir", lex);
  const Sentence s = support::discover_sentence();
  FrameInstance wrong_lu = support::discover_instance();
  wrong_lu.lu = "décider";
  EXPECT_THROW(encode_labels(s, wrong_lu, labels), EncodingError);
  FrameInstance unknown_fe = support::discover_instance();
  unknown_fe.roles[0].fe = "Decision";
  EXPECT_THROW(encode_labels(s, unknown_fe, labels), EncodingError);
  FrameInstance overlap = support::discover_instance();
  overlap.roles.push_back({"Time", 1, 1});
  EXPECT_THROW(encode_labels(s, overlap, labels), EncodingError);
}

TEST(Tagging, DecodeEncodeIsIdentityOnRandomInstances) {
  const FrameLexicon lex = ambiguous_lexicon();
  const LabelSet labels = LabelSet::build("combattre", lex);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    auto [s, inst] = support::random_instance(lex, "combattre", rng);
    const auto y = encode_labels(s, inst, labels);
    EXPECT_TRUE(is_well_formed(y, labels));
    DecodeStats stats;
    EXPECT_EQ(decode_labels(y, inst.target, labels, &stats), inst);
    EXPECT_EQ(stats.repaired_orphans, 0);
  }
}

TEST(Tagging, OrphanInsideOpensSpan) {
  const LabelSet labels = LabelSet::build("combattre", ambiguous_lexicon());
  auto id = [&](const char* l) { return labels.find(l); };
  // I-Side_1 right after O, then I-Time after a Side_1 span.
  const LabelSequence y{id("I-Side_1"), id("I-Side_1"), id("T:Hostile_encounter"),
                        id("B-Side_2"), id("I-Time"), id("O")};
  EXPECT_FALSE(is_well_formed(y, labels));
  const std::vector<int> target{2};
  DecodeStats stats;
  const FrameInstance inst = decode_labels(y, target, labels, &stats);
  EXPECT_EQ(stats.repaired_orphans, 2);
  EXPECT_EQ(inst.frame, "Hostile_encounter");
  EXPECT_EQ(inst.roles, (std::vector<RoleSpan>{{"Side_1", 0, 1}, {"Side_2", 3, 3}, {"Time", 4, 4}}));
}

TEST(Tagging, NonTargetLabelOnTargetMeansOther) {
  const LabelSet labels = LabelSet::build("combattre", ambiguous_lexicon());
  const LabelSequence y{labels.find("B-Side_1"), labels.find("O"), labels.find("B-Time")};
  const std::vector<int> target{1};
  const FrameInstance inst = decode_labels(y, target, labels);
  EXPECT_EQ(inst.frame, "OTHER");
  EXPECT_TRUE(inst.roles.empty());
}

TEST(Tagging, FilterDropsIncompatibleRoles) {
  const FrameLexicon lex = ambiguous_lexicon();
  FrameInstance inst{"combattre", "Quarreling", {2}, {{"Arguers", 0, 1}, {"Side_2", 3, 4}}};
  const auto result = filter_incompatible_roles(inst, lex);
  EXPECT_EQ(result.instance.roles, (std::vector<RoleSpan>{{"Arguers", 0, 1}}));
  EXPECT_EQ(result.dropped, (std::vector<RoleSpan>{{"Side_2", 3, 4}}));

  FrameInstance other{"combattre", "OTHER", {2}, {{"Arguers", 0, 1}}};
  EXPECT_TRUE(filter_incompatible_roles(other, lex).instance.roles.empty());

  FrameInstance unknown{"combattre", "Nope", {2}, {}};
  EXPECT_THROW(filter_incompatible_roles(unknown, lex), ValidationError);
}

TEST(Tagging, ParseLabelRejectsGarbage) {
  EXPECT_EQ(parse_label("O").kind, LabelKind::kOutside);
  EXPECT_EQ(parse_label("B-X").name, "X");
  EXPECT_THROW(parse_label("Q-X"), EncodingError);
}

}  // namespace
