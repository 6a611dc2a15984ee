#include <gtest/gtest.h>

#include "framecrf/error.h"
#include "framecrf/lexicon.h"
#include "test_support.h"

namespace {

using namespace framecrf;

TEST(Lexicon, OtherAlwaysPresent) {
  FrameLexicon lex;
  EXPECT_TRUE(lex.has_frame("OTHER"));
  EXPECT_TRUE(lex.fes_of("OTHER").empty());
  EXPECT_TRUE(lex.lu_evokes("anything", "OTHER"));
}

TEST(Lexicon, Queries) {
  const FrameLexicon lex = support::small_lexicon();
  EXPECT_TRUE(lex.has_lu("découvrir"));
  EXPECT_FALSE(lex.has_lu("voir"));
  EXPECT_TRUE(lex.frames_of("voir").empty());
  EXPECT_EQ(lex.frames_of("décider"), FrameLexicon::FrameSet{"Deciding"});
  EXPECT_TRUE(lex.allows("Deciding", "Decision"));
  EXPECT_FALSE(lex.allows("Becoming_aware", "Decision"));
  EXPECT_FALSE(lex.allows("OTHER", "Cognizer"));
  EXPECT_TRUE(lex.lu_evokes("découvrir", "Becoming_aware"));
  EXPECT_FALSE(lex.lu_evokes("découvrir", "Deciding"));
  EXPECT_THROW(lex.fes_of("Nope"), ValidationError);
}

TEST(Lexicon, RejectsBadDeclarations) {
  FrameLexicon lex = support::small_lexicon();
  EXPECT_THROW(lex.add_frame("Deciding", {}), ValidationError);
  EXPECT_THROW(lex.add_frame("OTHER", {"X"}), ValidationError);
  EXPECT_THROW(lex.add_lu("décider", {"Deciding"}), ValidationError);
  EXPECT_THROW(lex.add_lu("voir", {"Perception"}), ValidationError);
}

TEST(Lexicon, JsonRoundTripAndFingerprint) {
  const FrameLexicon lex = support::small_lexicon();
  const FrameLexicon back = parse_lexicon_string(lex.to_json());
  EXPECT_EQ(back, lex);
  EXPECT_EQ(back.fingerprint(), lex.fingerprint());
  EXPECT_EQ(lex.fingerprint().size(), 16u);

  FrameLexicon other = lex;
  other.add_frame("Attack", {"Assailant"});
  EXPECT_NE(other.fingerprint(), lex.fingerprint());
}

TEST(Lexicon, ParseRejectsDuplicates) {
  EXPECT_THROW(parse_lexicon_string(R"({"frames":{"A":["x","x"]}})"), ValidationError);
  EXPECT_THROW(parse_lexicon_string(R"({"frames":{"A":[],"A":[]}})"), ValidationError);
  EXPECT_THROW(parse_lexicon_string(R"({"lus":{"v":["Missing"]}})"), ValidationError);
  EXPECT_THROW(parse_lexicon_string(R"([1,2])"), ValidationError);
}

TEST(Lexicon, EmptyTextIsEmptyLexicon) {
  EXPECT_EQ(parse_lexicon_string("  \n"), FrameLexicon{});
}

TEST(Lexicon, Fnv1aKnownVectors) {
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

}  // namespace
