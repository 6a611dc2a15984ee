#pragma once

// Hand-built corpora shared by the unit tests and the acceptance suite.

#include <string>
#include <vector>

#include "framecrf/corpus.h"
#include "test_support.h"

namespace fixtures {

using namespace framecrf;

// Chain-shaped sentence: token i hangs off token i-1, token 0 is the root.
inline Sentence chain(int n, const std::string& sent_id, const std::string& doc = "d1") {
  Sentence s;
  s.doc_id = doc;
  s.sent_id = sent_id;
  for (int i = 0; i < n; ++i) {
    s.tokens.push_back({i, "w" + std::to_string(i), "w" + std::to_string(i), "V",
                        i == 0 ? kRootHead : i - 1, i == 0 ? "root" : "dep"});
  }
  return s;
}

inline Corpus wrap(std::vector<Sentence> sentences, const std::string& doc = "d1") {
  Corpus c;
  c.documents.push_back({doc, "src", std::move(sentences)});
  return c;
}

struct GoldAndPred {
  Corpus gold;
  Corpus pred;
};

// Three gold instances: two frames and one OTHER. The prediction selects
// every frame correctly; of the six gold roles it finds Cognizer exactly,
// Phenomenon by partial overlap, Place under the wrong label (Time) and
// misses the second Time. Hand counts:
//   DC tp 2 fp 0 fn 0, SC tp 2 fp 0 fn 0, DR tp 5 fp 0 fn 1, SR tp 4 fp 1 fn 2.
inline GoldAndPred golden_eval() {
  Sentence g1 = chain(12, "s1");
  g1.frames.push_back({"découvrir", "Becoming_aware", {2},
                       {{"Cognizer", 0, 1}, {"Phenomenon", 3, 4}, {"Place", 5, 6}}});
  g1.frames.push_back({"décider", "Deciding", {8},
                       {{"Cognizer", 7, 7}, {"Decision", 9, 10}, {"Time", 11, 11}}});
  Sentence g2 = chain(4, "s2");
  g2.frames.push_back({"découvrir", "OTHER", {1}, {}});

  Sentence p1 = g1;
  p1.frames[0].roles = {{"Cognizer", 0, 1}, {"Phenomenon", 4, 4}, {"Time", 5, 6}};
  p1.frames[1].roles = {{"Cognizer", 7, 7}, {"Decision", 9, 10}};
  Sentence p2 = g2;
  return {wrap({g1, g2}), wrap({p1, p2})};
}

// Document with counts[0] Becoming_aware and counts[1] Deciding instances,
// one per sentence.
inline Document doc_with(const std::string& id, const std::vector<int>& counts,
                         const std::string& source = "src") {
  static const char* frames[] = {"Becoming_aware", "Deciding"};
  static const char* lus[] = {"découvrir", "décider"};
  Document d{id, source, {}};
  int sent = 0;
  for (std::size_t f = 0; f < counts.size(); ++f) {
    for (int i = 0; i < counts[f]; ++i) {
      Sentence s = support::sentence({{"il", "CLS", 1, "suj"}, {"x", "V", -1, "root"}}, id,
                                     "s" + std::to_string(sent++));
      s.frames.push_back({lus[f], frames[f], {1}, {{"Cognizer", 0, 0}}});
      d.sentences.push_back(std::move(s));
    }
  }
  if (d.sentences.empty()) {
    d.sentences.push_back(support::sentence({{"x", "V", -1, "root"}}, id, "s0"));
  }
  return d;
}

inline constexpr int kTenDocFolds = 5;

// Ten documents of distinct sizes (3 to 21 instances) and uneven frame mix,
// 60 instances of each frame, split into kTenDocFolds folds. Greedy
// placement lands every per-frame fold count within 12 ± 2.
inline Corpus ten_documents() {
  const std::vector<std::vector<int>> profile{{6, 0}, {2, 1}, {2, 9},  {3, 4},  {12, 2},
                                              {10, 9}, {6, 12}, {8, 9}, {11, 10}, {0, 4}};
  Corpus c;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    c.documents.push_back(doc_with("doc" + std::to_string(i), profile[i]));
  }
  return c;
}

}  // namespace fixtures
