#pragma once

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "framecrf/corpus.h"
#include "framecrf/crf.h"
#include "framecrf/lexicon.h"

namespace support {

using namespace framecrf;

struct Tok {
  std::string form;
  std::string pos;
  int head;
  std::string deprel;
  std::string lemma = "";  // defaults to form
};

inline Sentence sentence(std::initializer_list<Tok> toks, std::string doc = "d1",
                         std::string sent = "s1") {
  Sentence s;
  s.doc_id = std::move(doc);
  s.sent_id = std::move(sent);
  int i = 0;
  for (const auto& t : toks) {
    s.tokens.push_back({i++, t.form, t.lemma.empty() ? t.form : t.lemma, t.pos, t.head, t.deprel});
  }
  return s;
}

// "le soldat découvrit la lettre à Verdun ."
inline Sentence discover_sentence() {
  return sentence({{"le", "DET", 1, "det"},
                   {"soldat", "NC", 2, "suj"},
                   {"découvrit", "V", -1, "root", "découvrir"},
                   {"la", "DET", 4, "det"},
                   {"lettre", "NC", 2, "obj"},
                   {"à", "P", 2, "mod"},
                   {"Verdun", "NPP", 5, "obj"},
                   {".", "PONCT", 2, "ponct"}});
}

inline FrameLexicon small_lexicon() {
  FrameLexicon lex;
  lex.add_frame("Becoming_aware", {"Cognizer", "Phenomenon", "Time", "Place"});
  lex.add_frame("Deciding", {"Cognizer", "Decision", "Time", "Place"});
  lex.add_lu("découvrir", {"Becoming_aware"});
  lex.add_lu("décider", {"Deciding"});
  return lex;
}

inline FrameInstance discover_instance() {
  return {"découvrir", "Becoming_aware", {2},
          {{"Cognizer", 0, 1}, {"Phenomenon", 3, 4}, {"Place", 5, 6}}};
}

inline CrfWeights random_weights(int features, int labels, std::mt19937_64& rng,
                                 double scale = 1.0, bool integer = false) {
  CrfWeights w(features, labels);
  std::uniform_real_distribution<double> real(-scale, scale);
  std::uniform_int_distribution<int> small(-2, 2);
  for (double& p : w.params()) p = integer ? small(rng) : real(rng);
  return w;
}

inline FeatureVector random_features(int length, int features, int per_position,
                                     std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, features - 1);
  FeatureVector x;
  for (int t = 0; t < length; ++t) {
    std::vector<FeatureId> ids;
    for (int k = 0; k < per_position; ++k) ids.push_back(pick(rng));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    x.positions.push_back(std::move(ids));
  }
  return x;
}

inline LabelSequence random_labels(int length, int labels, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, labels - 1);
  LabelSequence y(length);
  for (auto& v : y) v = pick(rng);
  return y;
}

// Random well-formed instance of `lu` on a chain-shaped sentence of 3..14
// tokens: contiguous 1-2 token target, any allowed frame or OTHER, and
// non-overlapping roles drawn from the frame's inventory.
inline std::pair<Sentence, FrameInstance> random_instance(const FrameLexicon& lex,
                                                          const std::string& lu,
                                                          std::mt19937_64& rng) {
  const int n = 3 + static_cast<int>(rng() % 12);
  Sentence s;
  for (int i = 0; i < n; ++i) {
    s.tokens.push_back({i, "w" + std::to_string(i), "w" + std::to_string(i), "X",
                        i == 0 ? kRootHead : i - 1, i == 0 ? "root" : "dep"});
  }
  FrameInstance inst;
  inst.lu = lu;
  const int tlen = 1 + static_cast<int>(rng() % 2);
  const int tstart = static_cast<int>(rng() % (n - tlen + 1));
  for (int i = 0; i < tlen; ++i) inst.target.push_back(tstart + i);
  std::vector<std::string> frames(lex.frames_of(lu).begin(), lex.frames_of(lu).end());
  frames.emplace_back(kOtherFrame);
  inst.frame = frames[rng() % frames.size()];
  if (!inst.is_other()) {
    std::vector<std::string> fes(lex.fes_of(inst.frame).begin(), lex.fes_of(inst.frame).end());
    for (int i = 0; i < n;) {
      if (i >= tstart && i < tstart + tlen) {
        ++i;
        continue;
      }
      if (rng() % 10 < 4) {
        int end = i;
        const int want = static_cast<int>(rng() % 3);
        while (end - i < want && end + 1 < n && !(end + 1 >= tstart && end + 1 < tstart + tlen)) {
          ++end;
        }
        inst.roles.push_back({fes[rng() % fes.size()], i, end});
        i = end + 1;
      } else {
        ++i;
      }
    }
  }
  s.frames.push_back(inst);
  return {std::move(s), std::move(inst)};
}

// Fresh empty directory under the system temp dir, private to this process
// so parallel ctest runs do not collide.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("framecrf-test-" + std::to_string(::getpid()) + "-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
